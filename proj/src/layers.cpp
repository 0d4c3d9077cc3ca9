#include "attic/nn/layers.hpp"

#include <cmath>

#include "attic/errors.hpp"

namespace attic::nn {

Dense Dense::create(ParameterStore& params, const std::string& prefix, int in, int out) {
    return {params.create(prefix + ".w", {out, in}, Init::GlorotUniform),
            params.create(prefix + ".b", {out}, Init::Zeros)};
}

Dense Dense::from_store(const ParameterStore& params, const std::string& prefix) {
    return {params.get(prefix + ".w"), params.get(prefix + ".b")};
}

Mlp Mlp::create(ParameterStore& params, const std::string& prefix, const std::vector<int>& dims) {
    if (dims.size() < 2) throw ContractError("mlp needs at least in/out dims");
    Mlp mlp;
    for (size_t i = 0; i + 1 < dims.size(); ++i)
        mlp.layers.push_back(
            Dense::create(params, prefix + ".l" + std::to_string(i), dims[i], dims[i + 1]));
    return mlp;
}

Mlp Mlp::from_store(const ParameterStore& params, const std::string& prefix, int n_layers) {
    Mlp mlp;
    for (int i = 0; i < n_layers; ++i)
        mlp.layers.push_back(Dense::from_store(params, prefix + ".l" + std::to_string(i)));
    return mlp;
}

Tensor Mlp::operator()(Tensor x) const {
    for (size_t i = 0; i < layers.size(); ++i) {
        x = layers[i](x);
        if (i + 1 < layers.size()) x = tanh(x);
    }
    return x;
}

LstmParams LstmParams::create(ParameterStore& params, const std::string& prefix, int input_dim,
                              int hidden_dim) {
    return {params.create(prefix + ".wx", {4 * hidden_dim, input_dim}, Init::GlorotUniform),
            params.create(prefix + ".wh", {4 * hidden_dim, hidden_dim}, Init::GlorotUniform),
            params.create(prefix + ".b", {4 * hidden_dim}, Init::LstmBias)};
}

LstmParams LstmParams::from_store(const ParameterStore& params, const std::string& prefix) {
    return {params.get(prefix + ".wx"), params.get(prefix + ".wh"), params.get(prefix + ".b")};
}

LstmState lstm_zero_state(int hidden_dim) {
    return {Tensor::zeros({hidden_dim}), Tensor::zeros({hidden_dim})};
}

namespace {

// Fused cell: value holds [h'; c']. Saved gate activations drive the
// hand-derived backward pass (checked against finite differences in tests).
struct LstmNode : detail::Node {
    int h_dim = 0;
    std::vector<double> gi, gf, gg, go, tc;  // i, f, g, o, tanh(c')

    void backprop() override {
        auto& x = parents[0];
        auto& h_prev = parents[1];
        auto& c_prev = parents[2];
        auto& wx = parents[3];
        auto& wh = parents[4];
        auto& b = parents[5];
        int H = h_dim;
        int D = static_cast<int>(x->value.size());

        std::vector<double> dz(4 * H);
        for (int j = 0; j < H; ++j) {
            double dh = grad[j];
            double dc = grad[H + j] + dh * go[j] * (1.0 - tc[j] * tc[j]);
            double d_o = dh * tc[j];
            double d_i = dc * gg[j];
            double d_g = dc * gi[j];
            double d_f = dc * c_prev->value[j];
            dz[j] = d_i * gi[j] * (1.0 - gi[j]);
            dz[H + j] = d_f * gf[j] * (1.0 - gf[j]);
            dz[2 * H + j] = d_g * (1.0 - gg[j] * gg[j]);
            dz[3 * H + j] = d_o * go[j] * (1.0 - go[j]);
            if (c_prev->requires_grad) {
                c_prev->ensure_grad();
                c_prev->grad[j] += dc * gf[j];
            }
        }

        if (b->requires_grad) {
            b->ensure_grad();
            for (int r = 0; r < 4 * H; ++r) b->grad[r] += dz[r];
        }
        if (wx->requires_grad) {
            wx->ensure_grad();
            for (int r = 0; r < 4 * H; ++r) {
                double g = dz[r];
                if (g == 0.0) continue;
                double* row = wx->grad.data() + r * D;
                for (int j = 0; j < D; ++j) row[j] += g * x->value[j];
            }
        }
        if (wh->requires_grad) {
            wh->ensure_grad();
            for (int r = 0; r < 4 * H; ++r) {
                double g = dz[r];
                if (g == 0.0) continue;
                double* row = wh->grad.data() + r * H;
                for (int j = 0; j < H; ++j) row[j] += g * h_prev->value[j];
            }
        }
        if (x->requires_grad) {
            x->ensure_grad();
            for (int r = 0; r < 4 * H; ++r) {
                double g = dz[r];
                if (g == 0.0) continue;
                const double* row = wx->value.data() + r * D;
                for (int j = 0; j < D; ++j) x->grad[j] += g * row[j];
            }
        }
        if (h_prev->requires_grad) {
            h_prev->ensure_grad();
            for (int r = 0; r < 4 * H; ++r) {
                double g = dz[r];
                if (g == 0.0) continue;
                const double* row = wh->value.data() + r * H;
                for (int j = 0; j < H; ++j) h_prev->grad[j] += g * row[j];
            }
        }
    }
};

double sigmoid_scalar(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

std::pair<Tensor, LstmState> lstm_step(const Tensor& input, const LstmState& state,
                                       const LstmParams& params) {
    int H = params.hidden_dim();
    int D = params.input_dim();
    if (input.size() != D) throw ContractError("lstm input dim mismatch");
    if (state.hidden.size() != H || state.cell.size() != H)
        throw ContractError("lstm state dim mismatch");

    auto node = std::make_shared<LstmNode>();
    node->shape = {2 * H};
    node->value.resize(2 * H);
    node->h_dim = H;
    node->parents = {input.node(),          state.hidden.node(), state.cell.node(),
                     params.w_input.node(), params.w_hidden.node(), params.bias.node()};
    for (const auto& p : node->parents)
        if (p->requires_grad) node->requires_grad = true;

    node->gi.resize(H);
    node->gf.resize(H);
    node->gg.resize(H);
    node->go.resize(H);
    node->tc.resize(H);

    const double* wx = params.w_input.values().data();
    const double* wh = params.w_hidden.values().data();
    const double* bias = params.bias.values().data();
    const double* xv = input.values().data();
    const double* hv = state.hidden.values().data();
    const double* cv = state.cell.values().data();

    std::vector<double> z(4 * H);
    for (int r = 0; r < 4 * H; ++r) {
        double acc = bias[r];
        const double* xrow = wx + r * D;
        for (int j = 0; j < D; ++j) acc += xrow[j] * xv[j];
        const double* hrow = wh + r * H;
        for (int j = 0; j < H; ++j) acc += hrow[j] * hv[j];
        z[r] = acc;
    }
    for (int j = 0; j < H; ++j) {
        double i = sigmoid_scalar(z[j]);
        double f = sigmoid_scalar(z[H + j]);
        double g = std::tanh(z[2 * H + j]);
        double o = sigmoid_scalar(z[3 * H + j]);
        double c_new = f * cv[j] + i * g;
        double t = std::tanh(c_new);
        node->gi[j] = i;
        node->gf[j] = f;
        node->gg[j] = g;
        node->go[j] = o;
        node->tc[j] = t;
        node->value[j] = o * t;       // h'
        node->value[H + j] = c_new;   // c'
    }

    Tensor both(node);
    Tensor h = slice(both, 0, H);
    Tensor c = slice(both, H, H);
    return {h, LstmState{h, c}};
}

AttentionResult attention(const Tensor& queries, const Tensor& keys, const Tensor& values,
                          double scale) {
    if (queries.shape().size() != 2 || keys.shape().size() != 2 || values.shape().size() != 2)
        throw ContractError("attention expects matrices");
    if (queries.cols() != keys.cols()) throw ContractError("attention query/key dim mismatch");
    if (keys.rows() != values.rows()) throw ContractError("attention key/value count mismatch");
    Tensor scores = affine(matmul_nt(queries, keys), scale, 0.0);
    Tensor weights = softmax_rows(scores);
    Tensor mixed = matmul(weights, values);
    int q = queries.rows(), v = values.cols();
    return {reshape(mixed, {q * v}), weights};
}

}  // namespace attic::nn

#include "attic/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "attic/errors.hpp"

namespace attic::nn {

using detail::Node;

namespace {

int shape_size(const std::vector<int>& shape) {
    int n = 1;
    for (int d : shape) n *= d;
    return n;
}

void check(bool ok, const char* what) {
    if (!ok) throw ContractError(std::string("tensor op: ") + what);
}

template <typename T, typename... Parents>
std::shared_ptr<T> make_node(std::vector<int> shape, const Parents&... parents) {
    auto node = std::make_shared<T>();
    node->shape = std::move(shape);
    node->value.resize(shape_size(node->shape));
    (node->parents.push_back(parents.node()), ...);
    for (const auto& p : node->parents)
        if (p->requires_grad) node->requires_grad = true;
    return node;
}

double stable_softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

}  // namespace

Tensor Tensor::constant(std::vector<int> shape, std::vector<double> data) {
    check(shape_size(shape) == static_cast<int>(data.size()), "constant data/shape mismatch");
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->value = std::move(data);
    return Tensor(node);
}

Tensor Tensor::scalar(double value) { return constant({1}, {value}); }

Tensor Tensor::zeros(std::vector<int> shape) {
    auto node = std::make_shared<Node>();
    node->value.assign(shape_size(shape), 0.0);
    node->shape = std::move(shape);
    return Tensor(node);
}

double Tensor::scalar_value() const {
    check(node_ && node_->size() == 1, "scalar_value on non-scalar");
    return node_->value[0];
}

std::vector<double>& Tensor::leaf_values() {
    check(node_->parents.empty(), "leaf_values on non-leaf");
    return node_->value;
}

// ---------------------------------------------------------------------------
// Elementwise ops

namespace {

struct AddNode : Node {
    void backprop() override {
        for (auto& p : parents) {
            if (!p->requires_grad) continue;
            p->ensure_grad();
            for (int i = 0; i < size(); ++i) p->grad[i] += grad[i];
        }
    }
};

struct SubNode : Node {
    void backprop() override {
        if (parents[0]->requires_grad) {
            parents[0]->ensure_grad();
            for (int i = 0; i < size(); ++i) parents[0]->grad[i] += grad[i];
        }
        if (parents[1]->requires_grad) {
            parents[1]->ensure_grad();
            for (int i = 0; i < size(); ++i) parents[1]->grad[i] -= grad[i];
        }
    }
};

struct MulNode : Node {
    void backprop() override {
        auto& a = parents[0];
        auto& b = parents[1];
        if (a->requires_grad) {
            a->ensure_grad();
            for (int i = 0; i < size(); ++i) a->grad[i] += grad[i] * b->value[i];
        }
        if (b->requires_grad) {
            b->ensure_grad();
            for (int i = 0; i < size(); ++i) b->grad[i] += grad[i] * a->value[i];
        }
    }
};

struct AffineNode : Node {
    double m = 1.0;
    void backprop() override {
        auto& p = parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (int i = 0; i < size(); ++i) p->grad[i] += m * grad[i];
    }
};

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    check(a.shape() == b.shape(), "add shape mismatch");
    auto node = make_node<AddNode>(a.shape(), a, b);
    for (int i = 0; i < node->size(); ++i) node->value[i] = a[i] + b[i];
    return Tensor(node);
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check(a.shape() == b.shape(), "sub shape mismatch");
    auto node = make_node<SubNode>(a.shape(), a, b);
    for (int i = 0; i < node->size(); ++i) node->value[i] = a[i] - b[i];
    return Tensor(node);
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check(a.shape() == b.shape(), "mul shape mismatch");
    auto node = make_node<MulNode>(a.shape(), a, b);
    for (int i = 0; i < node->size(); ++i) node->value[i] = a[i] * b[i];
    return Tensor(node);
}

Tensor affine(const Tensor& x, double m, double c) {
    auto node = make_node<AffineNode>(x.shape(), x);
    node->m = m;
    for (int i = 0; i < node->size(); ++i) node->value[i] = m * x[i] + c;
    return Tensor(node);
}

// ---------------------------------------------------------------------------
// Linear algebra

namespace {

struct MatvecNode : Node {
    int m = 0, n = 0;
    void backprop() override {
        auto& w = parents[0];
        auto& x = parents[1];
        if (w->requires_grad) {
            w->ensure_grad();
            for (int i = 0; i < m; ++i) {
                double g = grad[i];
                if (g == 0.0) continue;
                double* wrow = w->grad.data() + i * n;
                for (int j = 0; j < n; ++j) wrow[j] += g * x->value[j];
            }
        }
        if (x->requires_grad) {
            x->ensure_grad();
            for (int i = 0; i < m; ++i) {
                double g = grad[i];
                if (g == 0.0) continue;
                const double* wrow = w->value.data() + i * n;
                for (int j = 0; j < n; ++j) x->grad[j] += g * wrow[j];
            }
        }
    }
};

struct MatmulNode : Node {
    int m = 0, k = 0, n = 0;
    bool transpose_b = false;
    void backprop() override {
        auto& a = parents[0];
        auto& b = parents[1];
        // C = A·B (or A·B^T); dA = dC·B^T (or dC·B), dB = A^T·dC (or dC^T·A).
        if (a->requires_grad) {
            a->ensure_grad();
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) {
                    double g = grad[i * n + j];
                    if (g == 0.0) continue;
                    if (!transpose_b) {
                        for (int p = 0; p < k; ++p) a->grad[i * k + p] += g * b->value[p * n + j];
                    } else {
                        for (int p = 0; p < k; ++p) a->grad[i * k + p] += g * b->value[j * k + p];
                    }
                }
        }
        if (b->requires_grad) {
            b->ensure_grad();
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) {
                    double g = grad[i * n + j];
                    if (g == 0.0) continue;
                    if (!transpose_b) {
                        for (int p = 0; p < k; ++p) b->grad[p * n + j] += g * a->value[i * k + p];
                    } else {
                        for (int p = 0; p < k; ++p) b->grad[j * k + p] += g * a->value[i * k + p];
                    }
                }
        }
    }
};

}  // namespace

Tensor matvec(const Tensor& w, const Tensor& x) {
    check(w.shape().size() == 2 && x.shape().size() == 1 && w.cols() == x.size(),
          "matvec shape mismatch");
    int m = w.rows(), n = w.cols();
    auto node = make_node<MatvecNode>(std::vector<int>{m}, w, x);
    node->m = m;
    node->n = n;
    const double* wd = w.values().data();
    const double* xd = x.values().data();
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        const double* row = wd + i * n;
        for (int j = 0; j < n; ++j) acc += row[j] * xd[j];
        node->value[i] = acc;
    }
    return Tensor(node);
}

static Tensor matmul_impl(const Tensor& a, const Tensor& b, bool transpose_b) {
    check(a.shape().size() == 2 && b.shape().size() == 2, "matmul needs matrices");
    int m = a.rows(), k = a.cols();
    int n = transpose_b ? b.rows() : b.cols();
    check(transpose_b ? b.cols() == k : b.rows() == k, "matmul inner dim mismatch");
    auto node = make_node<MatmulNode>(std::vector<int>{m, n}, a, b);
    node->m = m;
    node->k = k;
    node->n = n;
    node->transpose_b = transpose_b;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int p = 0; p < k; ++p)
                acc += a[i * k + p] * (transpose_b ? b[j * k + p] : b[p * n + j]);
            node->value[i * n + j] = acc;
        }
    return Tensor(node);
}

Tensor matmul(const Tensor& a, const Tensor& b) { return matmul_impl(a, b, false); }
Tensor matmul_nt(const Tensor& a, const Tensor& b) { return matmul_impl(a, b, true); }

// ---------------------------------------------------------------------------
// Shape ops

namespace {

struct ConcatNode : Node {
    void backprop() override {
        int offset = 0;
        for (auto& p : parents) {
            if (p->requires_grad) {
                p->ensure_grad();
                for (int i = 0; i < p->size(); ++i) p->grad[i] += grad[offset + i];
            }
            offset += p->size();
        }
    }
};

struct ReshapeNode : Node {
    void backprop() override {
        auto& p = parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (int i = 0; i < size(); ++i) p->grad[i] += grad[i];
    }
};

struct SliceNode : Node {
    int offset = 0;
    void backprop() override {
        auto& p = parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (int i = 0; i < size(); ++i) p->grad[offset + i] += grad[i];
    }
};

}  // namespace

Tensor concat(std::span<const Tensor> parts) {
    check(!parts.empty(), "concat of nothing");
    int total = 0;
    for (const auto& p : parts) total += p.size();
    auto node = std::make_shared<ConcatNode>();
    node->shape = {total};
    node->value.reserve(total);
    for (const auto& p : parts) {
        node->parents.push_back(p.node());
        if (p.requires_grad()) node->requires_grad = true;
        node->value.insert(node->value.end(), p.values().begin(), p.values().end());
    }
    return Tensor(node);
}

Tensor stack_rows(std::span<const Tensor> rows) {
    check(!rows.empty(), "stack_rows of nothing");
    int c = rows.front().size();
    for (const auto& r : rows) check(r.size() == c, "stack_rows ragged rows");
    Tensor flat = concat(rows);
    return reshape(flat, {static_cast<int>(rows.size()), c});
}

Tensor reshape(const Tensor& x, std::vector<int> shape) {
    check(shape_size(shape) == x.size(), "reshape size mismatch");
    auto node = make_node<ReshapeNode>(std::move(shape), x);
    node->value.assign(x.values().begin(), x.values().end());
    return Tensor(node);
}

Tensor slice(const Tensor& x, int offset, int len) {
    check(offset >= 0 && len >= 1 && offset + len <= x.size(), "slice out of range");
    auto node = make_node<SliceNode>(std::vector<int>{len}, x);
    node->offset = offset;
    for (int i = 0; i < len; ++i) node->value[i] = x[offset + i];
    return Tensor(node);
}

// ---------------------------------------------------------------------------
// Nonlinearities

namespace {

struct TanhNode : Node {
    void backprop() override {
        auto& p = parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (int i = 0; i < size(); ++i) p->grad[i] += grad[i] * (1.0 - value[i] * value[i]);
    }
};

struct SigmoidNode : Node {
    void backprop() override {
        auto& p = parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (int i = 0; i < size(); ++i) p->grad[i] += grad[i] * value[i] * (1.0 - value[i]);
    }
};

struct SoftplusNode : Node {
    void backprop() override {
        auto& p = parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (int i = 0; i < size(); ++i)
            p->grad[i] += grad[i] / (1.0 + std::exp(-p->value[i]));
    }
};

struct ExpNode : Node {
    void backprop() override {
        auto& p = parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (int i = 0; i < size(); ++i) p->grad[i] += grad[i] * value[i];
    }
};

struct LogNode : Node {
    void backprop() override {
        auto& p = parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (int i = 0; i < size(); ++i) p->grad[i] += grad[i] / p->value[i];
    }
};

}  // namespace

Tensor tanh(const Tensor& x) {
    auto node = make_node<TanhNode>(x.shape(), x);
    for (int i = 0; i < node->size(); ++i) node->value[i] = std::tanh(x[i]);
    return Tensor(node);
}

Tensor sigmoid(const Tensor& x) {
    auto node = make_node<SigmoidNode>(x.shape(), x);
    for (int i = 0; i < node->size(); ++i) node->value[i] = 1.0 / (1.0 + std::exp(-x[i]));
    return Tensor(node);
}

Tensor softplus(const Tensor& x) {
    auto node = make_node<SoftplusNode>(x.shape(), x);
    for (int i = 0; i < node->size(); ++i) node->value[i] = stable_softplus(x[i]);
    return Tensor(node);
}

Tensor exp(const Tensor& x) {
    auto node = make_node<ExpNode>(x.shape(), x);
    for (int i = 0; i < node->size(); ++i) node->value[i] = std::exp(x[i]);
    return Tensor(node);
}

Tensor log(const Tensor& x) {
    auto node = make_node<LogNode>(x.shape(), x);
    for (int i = 0; i < node->size(); ++i) node->value[i] = std::log(x[i]);
    return Tensor(node);
}

// ---------------------------------------------------------------------------
// Reductions and softmax family

namespace {

struct SumNode : Node {
    void backprop() override {
        auto& p = parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (double& g : p->grad) g += grad[0];
    }
};

struct DotNode : Node {
    void backprop() override {
        auto& a = parents[0];
        auto& b = parents[1];
        double g = grad[0];
        if (a->requires_grad) {
            a->ensure_grad();
            for (int i = 0; i < a->size(); ++i) a->grad[i] += g * b->value[i];
        }
        if (b->requires_grad) {
            b->ensure_grad();
            for (int i = 0; i < b->size(); ++i) b->grad[i] += g * a->value[i];
        }
    }
};

struct SoftmaxRowsNode : Node {
    int r = 0, c = 0;
    void backprop() override {
        auto& p = parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (int i = 0; i < r; ++i) {
            const double* y = value.data() + i * c;
            const double* gy = grad.data() + i * c;
            double inner = 0.0;
            for (int j = 0; j < c; ++j) inner += gy[j] * y[j];
            double* gx = p->grad.data() + i * c;
            for (int j = 0; j < c; ++j) gx[j] += y[j] * (gy[j] - inner);
        }
    }
};

struct LogsumexpNode : Node {
    void backprop() override {
        auto& p = parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        double g = grad[0];
        for (int i = 0; i < p->size(); ++i) p->grad[i] += g * std::exp(p->value[i] - value[0]);
    }
};

struct LogSoftmaxNode : Node {
    void backprop() override {
        auto& p = parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        double total = 0.0;
        for (int i = 0; i < size(); ++i) total += grad[i];
        for (int i = 0; i < size(); ++i) p->grad[i] += grad[i] - std::exp(value[i]) * total;
    }
};

struct NormalLogPdfNode : Node {
    double x = 0.0;
    void backprop() override {
        auto& mean = parents[0];
        auto& sd = parents[1];
        for (int i = 0; i < size(); ++i) {
            double m = mean->value[i], s = sd->value[i];
            double z = (x - m) / s;
            if (mean->requires_grad) {
                mean->ensure_grad();
                mean->grad[i] += grad[i] * z / s;
            }
            if (sd->requires_grad) {
                sd->ensure_grad();
                sd->grad[i] += grad[i] * (z * z - 1.0) / s;
            }
        }
    }
};

}  // namespace

Tensor sum(const Tensor& x) {
    auto node = make_node<SumNode>(std::vector<int>{1}, x);
    double acc = 0.0;
    for (double v : x.values()) acc += v;
    node->value[0] = acc;
    return Tensor(node);
}

Tensor dot(const Tensor& a, const Tensor& b) {
    check(a.size() == b.size(), "dot size mismatch");
    auto node = make_node<DotNode>(std::vector<int>{1}, a, b);
    double acc = 0.0;
    for (int i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    node->value[0] = acc;
    return Tensor(node);
}

Tensor softmax_rows(const Tensor& x) {
    check(x.shape().size() == 2, "softmax_rows needs a matrix");
    int r = x.rows(), c = x.cols();
    auto node = make_node<SoftmaxRowsNode>(x.shape(), x);
    node->r = r;
    node->c = c;
    for (int i = 0; i < r; ++i) {
        double max_v = x[i * c];
        for (int j = 1; j < c; ++j) max_v = std::max(max_v, x[i * c + j]);
        double total = 0.0;
        for (int j = 0; j < c; ++j) {
            double e = std::exp(x[i * c + j] - max_v);
            node->value[i * c + j] = e;
            total += e;
        }
        for (int j = 0; j < c; ++j) node->value[i * c + j] /= total;
    }
    return Tensor(node);
}

Tensor logsumexp(const Tensor& x) {
    auto node = make_node<LogsumexpNode>(std::vector<int>{1}, x);
    double max_v = x[0];
    for (int i = 1; i < x.size(); ++i) max_v = std::max(max_v, x[i]);
    double acc = 0.0;
    for (int i = 0; i < x.size(); ++i) acc += std::exp(x[i] - max_v);
    node->value[0] = max_v + std::log(acc);
    return Tensor(node);
}

Tensor log_softmax(const Tensor& x) {
    auto node = make_node<LogSoftmaxNode>(x.shape(), x);
    double max_v = x[0];
    for (int i = 1; i < x.size(); ++i) max_v = std::max(max_v, x[i]);
    double acc = 0.0;
    for (int i = 0; i < x.size(); ++i) acc += std::exp(x[i] - max_v);
    double lse = max_v + std::log(acc);
    for (int i = 0; i < x.size(); ++i) node->value[i] = x[i] - lse;
    return Tensor(node);
}

Tensor normal_log_pdf(double x, const Tensor& mean, const Tensor& sd) {
    check(mean.shape() == sd.shape(), "normal_log_pdf shape mismatch");
    auto node = make_node<NormalLogPdfNode>(mean.shape(), mean, sd);
    node->x = x;
    for (int i = 0; i < node->size(); ++i) {
        double z = (x - mean[i]) / sd[i];
        node->value[i] = -0.5 * z * z - std::log(sd[i]) - 0.91893853320467274178;
    }
    return Tensor(node);
}

// ---------------------------------------------------------------------------
// Reverse pass

void backward(const Tensor& loss, double seed) {
    check(loss.defined() && loss.size() == 1, "backward needs a scalar loss");
    Node* root = loss.node().get();
    if (!root->requires_grad) return;

    // Iterative post-order DFS; reversed it yields a valid reverse-topo order.
    std::vector<Node*> order;
    std::vector<std::pair<Node*, size_t>> stack;
    std::unordered_set<Node*> visited;
    stack.push_back({root, 0});
    visited.insert(root);
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* parent = node->parents[next++].get();
            if (parent->requires_grad && visited.insert(parent).second)
                stack.push_back({parent, 0});
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    root->ensure_grad();
    root->grad[0] += seed;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        (*it)->ensure_grad();
        (*it)->backprop();
    }
}

}  // namespace attic::nn

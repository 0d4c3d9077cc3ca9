#include "attic/nn/params.hpp"

#include <cmath>

#include "attic/errors.hpp"

namespace attic::nn {

namespace {

int shape_size(const std::vector<int>& shape) {
    int n = 1;
    for (int d : shape) n *= d;
    return n;
}

}  // namespace

Tensor ParameterStore::create(const std::string& name, std::vector<int> shape, Init init) {
    RandomStream rng(splitmix64(seed_) ^ fnv1a(name));
    int n = shape_size(shape);
    std::vector<double> data(n, 0.0);
    switch (init) {
        case Init::Zeros:
            break;
        case Init::GlorotUniform: {
            int fan_out = shape.size() == 2 ? shape[0] : n;
            int fan_in = shape.size() == 2 ? shape[1] : 1;
            double limit = std::sqrt(6.0 / (fan_in + fan_out));
            for (double& v : data) v = rng.uniform(-limit, limit);
            break;
        }
        case Init::SmallUniform:
            for (double& v : data) v = rng.uniform(-0.1, 0.1);
            break;
        case Init::LstmBias: {
            // Gate layout [i; f; g; o]; forget block starts unsaturated-open.
            int h = n / 4;
            for (int i = h; i < 2 * h; ++i) data[i] = 1.0;
            break;
        }
    }
    return create_with_data(name, std::move(shape), std::move(data));
}

Tensor ParameterStore::create_with_data(const std::string& name, std::vector<int> shape,
                                        std::vector<double> data) {
    if (params_.count(name)) throw ContractError("duplicate parameter: " + name);
    Tensor t = Tensor::constant(std::move(shape), std::move(data));
    t.node()->requires_grad = true;
    t.node()->is_param = true;
    params_.emplace(name, t);
    return t;
}

Tensor ParameterStore::get(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw ContractError("unknown parameter: " + name);
    return it->second;
}

void ParameterStore::zero_grad() {
    for (auto& [name, t] : params_) {
        auto& g = t.node()->grad;
        g.assign(t.node()->value.size(), 0.0);
    }
}

size_t ParameterStore::total_size() const {
    size_t n = 0;
    for (const auto& [name, t] : params_) n += t.node()->value.size();
    return n;
}

}  // namespace attic::nn

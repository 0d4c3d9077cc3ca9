#include "attic/nn/adam.hpp"

#include <cmath>

#include "attic/errors.hpp"

namespace attic::nn {

void Adam::step(ParameterStore& params, double lr) {
    // Validate first so a poisoned batch never half-updates the store.
    for (const auto& [name, t] : params.items()) {
        for (double g : t.node()->grad)
            if (!std::isfinite(g)) throw NumericError("non-finite gradient in " + name);
    }
    for (const auto& [name, t] : params.items()) {
        auto& node = *t.node();
        if (node.grad.empty()) continue;  // never touched by any backward pass
        Slot& slot = state_[name];
        size_t n = node.value.size();
        if (slot.m.size() != n) {
            slot.m.assign(n, 0.0);
            slot.v.assign(n, 0.0);
        }
        ++slot.t;
        double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(slot.t));
        double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(slot.t));
        for (size_t i = 0; i < n; ++i) {
            double g = node.grad[i];
            slot.m[i] = beta1_ * slot.m[i] + (1.0 - beta1_) * g;
            slot.v[i] = beta2_ * slot.v[i] + (1.0 - beta2_) * g * g;
            double m_hat = slot.m[i] / bc1;
            double v_hat = slot.v[i] / bc2;
            node.value[i] -= lr * m_hat / (std::sqrt(v_hat) + epsilon_);
        }
    }
}

}  // namespace attic::nn

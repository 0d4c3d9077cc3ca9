#pragma once

#include <cmath>
#include <functional>

#include "attic/nn/params.hpp"
#include "attic/nn/tensor.hpp"
#include "attic/rng.hpp"

namespace attic::testing {

// Central finite-difference probe of reverse-mode gradients. Rebuilds the
// loss graph per evaluation, so make_loss must be a deterministic function of
// the store's current parameter values.
//
// Returns the worst error over `probes` random (parameter, index) picks,
// where error = |ad - fd| / max(|ad|, |fd|, 1e-5).
inline double grad_check_max_error(nn::ParameterStore& params,
                                   const std::function<nn::Tensor()>& make_loss,
                                   RandomStream& rng, int probes, double step = 1e-5) {
    params.zero_grad();
    nn::Tensor loss = make_loss();
    nn::backward(loss);

    std::vector<std::pair<nn::Tensor, const std::string*>> all;
    for (const auto& [name, tensor] : params.items()) all.push_back({tensor, &name});

    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
        auto& [tensor, name] = all[static_cast<size_t>(rng.uniform01() * all.size())];
        int i = static_cast<int>(rng.uniform01() * tensor.size());
        double ad = tensor.grad().empty() ? 0.0 : tensor.grad()[i];

        nn::Tensor mutable_tensor = tensor;
        double saved = mutable_tensor.leaf_values()[i];
        mutable_tensor.leaf_values()[i] = saved + step;
        double plus = make_loss().scalar_value();
        mutable_tensor.leaf_values()[i] = saved - step;
        double minus = make_loss().scalar_value();
        mutable_tensor.leaf_values()[i] = saved;

        double fd = (plus - minus) / (2.0 * step);
        double err = std::abs(ad - fd) / std::max({std::abs(ad), std::abs(fd), 1e-5});
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace attic::testing

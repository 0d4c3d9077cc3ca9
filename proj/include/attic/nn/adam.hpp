#pragma once

#include <map>
#include <string>
#include <vector>

#include "attic/nn/params.hpp"

namespace attic::nn {

// Adam with bias correction. State is keyed by parameter name so that lazily
// created parameters join cleanly; each parameter carries its own step count.
class Adam {
public:
    Adam(double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
        : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

    // Applies one update from the accumulated gradients. Throws NumericError
    // on any non-finite gradient, leaving parameters untouched.
    void step(ParameterStore& params, double lr);

    struct Slot {
        std::vector<double> m, v;
        long long t = 0;
    };
    const std::map<std::string, Slot>& state() const { return state_; }
    std::map<std::string, Slot>& state() { return state_; }

    double beta1() const { return beta1_; }
    double beta2() const { return beta2_; }
    double epsilon() const { return epsilon_; }

private:
    double beta1_, beta2_, epsilon_;
    std::map<std::string, Slot> state_;
};

}  // namespace attic::nn

#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "attic/nn/tensor.hpp"
#include "attic/rng.hpp"

namespace attic::nn {

enum class Init {
    Zeros,
    GlorotUniform,     // matrices: +-sqrt(6 / (fan_in + fan_out))
    SmallUniform,      // embeddings: +-0.1
    LstmBias,          // zeros with the forget-gate block set to 1
};

// Named parameter registry. Initialization is seeded by hash(seed, name), so
// parameter values do not depend on creation order; lazily grown registries
// stay reproducible.
class ParameterStore {
public:
    explicit ParameterStore(uint64_t seed) : seed_(seed) {}

    Tensor create(const std::string& name, std::vector<int> shape, Init init);
    Tensor create_with_data(const std::string& name, std::vector<int> shape,
                            std::vector<double> data);

    bool contains(const std::string& name) const { return params_.count(name) > 0; }
    Tensor get(const std::string& name) const;

    // Name-sorted view (std::map order), stable across runs.
    const std::map<std::string, Tensor>& items() const { return params_; }

    void zero_grad();
    size_t total_size() const;
    uint64_t seed() const { return seed_; }

private:
    uint64_t seed_;
    std::map<std::string, Tensor> params_;
};

}  // namespace attic::nn

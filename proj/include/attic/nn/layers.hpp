#pragma once

#include <string>
#include <vector>

#include "attic/nn/params.hpp"
#include "attic/nn/tensor.hpp"

namespace attic::nn {

// Fully connected layer, y = W x + b.
struct Dense {
    Tensor weight;  // [out, in]
    Tensor bias;    // [out]

    static Dense create(ParameterStore& params, const std::string& prefix, int in, int out);
    static Dense from_store(const ParameterStore& params, const std::string& prefix);
    Tensor operator()(const Tensor& x) const { return add(matvec(weight, x), bias); }
    int out_dim() const { return weight.rows(); }
    int in_dim() const { return weight.cols(); }
};

// Dense stack with tanh between layers and a linear head.
struct Mlp {
    std::vector<Dense> layers;

    static Mlp create(ParameterStore& params, const std::string& prefix,
                      const std::vector<int>& dims);
    static Mlp from_store(const ParameterStore& params, const std::string& prefix, int n_layers);
    Tensor operator()(Tensor x) const;
    int out_dim() const { return layers.back().out_dim(); }
    int in_dim() const { return layers.front().in_dim(); }
};

struct LstmState {
    Tensor hidden;
    Tensor cell;
};

struct LstmParams {
    Tensor w_input;   // [4H, D]
    Tensor w_hidden;  // [4H, H]
    Tensor bias;      // [4H]

    static LstmParams create(ParameterStore& params, const std::string& prefix, int input_dim,
                             int hidden_dim);
    static LstmParams from_store(const ParameterStore& params, const std::string& prefix);
    int hidden_dim() const { return w_hidden.cols(); }
    int input_dim() const { return w_input.cols(); }
};

LstmState lstm_zero_state(int hidden_dim);

// One cell step; returns (output, new state), output aliasing the new hidden.
std::pair<Tensor, LstmState> lstm_step(const Tensor& input, const LstmState& state,
                                       const LstmParams& params);

struct AttentionResult {
    Tensor output;   // [q * v] concatenation of per-query weighted values
    Tensor weights;  // [q, l] softmax rows
};

// Scaled dot-product attention: weights = softmax(scale * Q K^T) row-wise,
// output rows = weights V, flattened.
AttentionResult attention(const Tensor& queries, const Tensor& keys, const Tensor& values,
                          double scale);

}  // namespace attic::nn

#pragma once

#include <memory>
#include <span>
#include <vector>

namespace attic::nn {

namespace detail {

// One node of the dynamic reverse-mode graph. Graphs are rebuilt per trace;
// parameter nodes persist across graphs and accumulate gradients until the
// optimizer clears them.
struct Node {
    std::vector<int> shape;
    std::vector<double> value;
    std::vector<double> grad;  // allocated on first backward touch
    std::vector<std::shared_ptr<Node>> parents;
    bool requires_grad = false;
    bool is_param = false;

    virtual ~Node() = default;
    virtual void backprop() {}

    int size() const { return static_cast<int>(value.size()); }
    void ensure_grad() {
        if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    }
};

}  // namespace detail

// Value-semantic handle to a graph node.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

    static Tensor constant(std::vector<int> shape, std::vector<double> data);
    static Tensor scalar(double value);
    static Tensor zeros(std::vector<int> shape);

    bool defined() const { return node_ != nullptr; }
    const std::vector<int>& shape() const { return node_->shape; }
    int size() const { return node_->size(); }
    int rows() const { return node_->shape.at(0); }
    int cols() const { return node_->shape.at(1); }

    std::span<const double> values() const { return node_->value; }
    double operator[](int i) const { return node_->value[i]; }
    double scalar_value() const;

    std::span<const double> grad() const { return node_->grad; }
    bool requires_grad() const { return node_->requires_grad; }

    const std::shared_ptr<detail::Node>& node() const { return node_; }

    // Mutation is reserved for leaves (parameters, finite-difference probes).
    std::vector<double>& leaf_values();

private:
    std::shared_ptr<detail::Node> node_;
};

// Elementwise; shapes must match.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
// Elementwise m * x + c with scalar constants.
Tensor affine(const Tensor& x, double m, double c);
inline Tensor neg(const Tensor& x) { return affine(x, -1.0, 0.0); }

Tensor matvec(const Tensor& w, const Tensor& x);      // [m,n]·[n] -> [m]
Tensor matmul(const Tensor& a, const Tensor& b);      // [m,k]·[k,n] -> [m,n]
Tensor matmul_nt(const Tensor& a, const Tensor& b);   // [m,k]·[n,k]^T -> [m,n]

Tensor concat(std::span<const Tensor> parts);         // 1-D concatenation
Tensor stack_rows(std::span<const Tensor> rows);      // l vectors [c] -> [l,c]
Tensor reshape(const Tensor& x, std::vector<int> shape);
Tensor slice(const Tensor& x, int offset, int len);   // flat 1-D slice

Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor softplus(const Tensor& x);
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);

Tensor sum(const Tensor& x);                          // -> scalar
Tensor dot(const Tensor& a, const Tensor& b);         // -> scalar
Tensor softmax_rows(const Tensor& x);                 // [r,c], stable per row
Tensor logsumexp(const Tensor& x);                    // 1-D -> scalar
Tensor log_softmax(const Tensor& x);                  // 1-D

// Elementwise Normal log-density of a fixed value under tensor parameters.
Tensor normal_log_pdf(double x, const Tensor& mean, const Tensor& std);

// Populate grad fields of every parameter reachable from `loss` (a scalar),
// accumulating on top of existing gradients. `seed` scales the whole pass.
void backward(const Tensor& loss, double seed = 1.0);

}  // namespace attic::nn

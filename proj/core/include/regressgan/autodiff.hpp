#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "regressgan/matrix.hpp"
#include "regressgan/rng.hpp"

namespace regressgan {

// ---------------------------------------------------------------------------
// Activations and loss kinds
// ---------------------------------------------------------------------------

enum class ActivationKind { identity, relu, leaky_relu, sigmoid };

struct Activation {
    ActivationKind kind = ActivationKind::identity;
    double slope = 0.0;  // leaky_relu negative-side slope

    static Activation identity() { return {ActivationKind::identity, 0.0}; }
    static Activation relu() { return {ActivationKind::relu, 0.0}; }
    static Activation leaky_relu(double slope) { return {ActivationKind::leaky_relu, slope}; }
    static Activation sigmoid() { return {ActivationKind::sigmoid, 0.0}; }
};

enum class LossKind { mse, bce_with_logits };
enum class GeneratorLossKind { minimax, non_saturating };

// Numerically stable scalar sigmoid (separate branch for negative inputs).
double stable_sigmoid(double t);
// log(1 + exp(t)) without overflow.
double softplus(double t);

// ---------------------------------------------------------------------------
// Tensor
// ---------------------------------------------------------------------------

// Dense double tensor participating in a gradient tape. Handles share the
// underlying storage; the tape records handles, so parameter tensors keep
// their identity across training steps.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(std::vector<std::size_t> shape, bool requires_grad = false);
    static Tensor from_values(std::vector<std::size_t> shape, std::vector<double> values,
                              bool requires_grad = false);
    static Tensor from_matrix(const Matrix& m, bool requires_grad = false);
    static Tensor column(std::span<const double> values, bool requires_grad = false);  // [n, 1]
    static Tensor scalar(double value, bool requires_grad = false);

    bool defined() const { return d_ != nullptr; }
    const std::vector<std::size_t>& shape() const;
    std::size_t numel() const;
    bool is_scalar() const { return numel() == 1; }
    std::size_t dim(std::size_t i) const { return shape()[i]; }

    std::span<double> values();
    std::span<const double> values() const;
    double scalar_value() const;

    bool requires_grad() const;
    void set_requires_grad(bool v);

    bool has_grad() const;
    std::span<double> grad();
    std::span<const double> grad() const;
    std::span<double> ensure_grad();  // allocates zeros when absent
    void zero_grad();                 // zeroes in place when present

    // True when this tensor was produced by a recorded op.
    bool is_internal() const;
    // Gradients are propagated into this tensor during backward.
    bool wants_grad() const { return requires_grad() || is_internal(); }

    bool same_storage(const Tensor& other) const { return d_ == other.d_; }

    std::string shape_string() const;

private:
    struct Data {
        std::vector<std::size_t> shape;
        std::vector<double> values;
        std::vector<double> grad;  // empty = absent
        bool requires_grad = false;
        bool internal = false;
    };
    std::shared_ptr<Data> d_;
    friend class Tape;
};

// ---------------------------------------------------------------------------
// Tape
// ---------------------------------------------------------------------------

// Reverse-mode tape. Nodes are appended in execution order, which is a
// topological order by construction; one backward pass visits each node once
// in reverse. Gradients accumulate additively; zeroing is the caller's job.
class Tape {
public:
    struct Node {
        std::vector<Tensor> inputs;
        Tensor output;
        std::function<void(const Node&)> backward;
    };

    Tensor record(std::vector<Tensor> inputs, Tensor output,
                  std::function<void(const Node&)> backward_rule);

    // Seeds d(root)/d(root) = 1 and propagates to every recorded tensor with
    // wants_grad(). Root must be a scalar produced on this tape.
    void backward(const Tensor& root);

    std::size_t node_count() const { return nodes_.size(); }
    void clear() { nodes_.clear(); }

private:
    std::vector<Node> nodes_;
};

inline void backward(Tape& tape, const Tensor& root) { tape.backward(root); }

// ---------------------------------------------------------------------------
// Layer parameters
// ---------------------------------------------------------------------------

struct DenseParams {
    Tensor weight;  // [in_dim, out_dim]
    Tensor bias;    // [out_dim]

    std::size_t in_dim() const { return weight.dim(0); }
    std::size_t out_dim() const { return weight.dim(1); }

    // Kaiming-uniform weights for relu-family layers; zero bias.
    static DenseParams kaiming_uniform(std::size_t in_dim, std::size_t out_dim, double gain,
                                       RngStream& rng);
    // Xavier-uniform weights for the final linear layer; zero bias.
    static DenseParams xavier_uniform(std::size_t in_dim, std::size_t out_dim, RngStream& rng);
};

double activation_gain(const Activation& act);

// ---------------------------------------------------------------------------
// Recorded operations
// ---------------------------------------------------------------------------

// out = x . W + b, one fused node.
Tensor dense_forward(Tape& tape, const Tensor& x, const DenseParams& p);

// Elementwise activation.
Tensor activation(Tape& tape, const Tensor& x, const Activation& act);

// [b, m] ++ [b, n] -> [b, m + n]
Tensor concat_cols(Tape& tape, const Tensor& a, const Tensor& b);

// Elementwise sum of same-shape tensors.
Tensor add(Tape& tape, const Tensor& a, const Tensor& b);

// Scalar mean((pred - target)^2).
Tensor mse_loss(Tape& tape, const Tensor& pred, const Tensor& target);

// Scalar mean over the log-sum-exp-stable binary cross entropy on logits;
// sigmoid(logit) is never materialized on the forward path.
Tensor bce_with_logits_loss(Tape& tape, const Tensor& logits, const Tensor& targets);

Tensor loss(Tape& tape, const Tensor& pred, const Tensor& target, LossKind kind);

// Generator objective on the discriminator's fake logits:
//   minimax:        mean log(1 - sigmoid(z))  == mean -softplus(z)
//   non_saturating: mean -log sigmoid(z)      == mean  softplus(-z)
// Both are minimized.
Tensor generator_adversarial_loss(Tape& tape, const Tensor& fake_logits, GeneratorLossKind kind);

// ---------------------------------------------------------------------------
// Value-only kernels (no tape) used on evaluation paths
// ---------------------------------------------------------------------------

void dense_forward_values(const Matrix& x, const DenseParams& p, Matrix& out);
void activation_values_inplace(Matrix& m, const Activation& act);

}  // namespace regressgan

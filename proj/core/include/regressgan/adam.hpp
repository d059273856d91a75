#pragma once

#include <vector>

#include "regressgan/autodiff.hpp"

namespace regressgan {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Per-optimizer state: moment arrays matching each parameter tensor.
struct AdamState {
    long step_count = 0;
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;
    AdamConfig config;
};

// Standard bias-corrected Adam over a fixed parameter list. Gradients are
// read from the tensors; zeroing them afterwards is the caller's contract,
// which keeps multi-batch gradient accumulation expressible.
class AdamOptimizer {
public:
    AdamOptimizer(std::vector<Tensor> params, const AdamConfig& cfg);

    void step();
    void zero_grad();

    const AdamState& state() const { return state_; }
    const std::vector<Tensor>& params() const { return params_; }

private:
    std::vector<Tensor> params_;
    AdamState state_;
};

}  // namespace regressgan

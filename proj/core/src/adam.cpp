#include "regressgan/adam.hpp"

#include <cmath>

#include "regressgan/errors.hpp"

namespace regressgan {

AdamOptimizer::AdamOptimizer(std::vector<Tensor> params, const AdamConfig& cfg)
    : params_(std::move(params)) {
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0) ||
        !(cfg.epsilon > 0.0)) {
        throw DomainError("AdamOptimizer: invalid beta/epsilon");
    }
    state_.config = cfg;
    state_.first_moment.reserve(params_.size());
    state_.second_moment.reserve(params_.size());
    for (const auto& p : params_) {
        state_.first_moment.emplace_back(p.numel(), 0.0);
        state_.second_moment.emplace_back(p.numel(), 0.0);
    }
}

void AdamOptimizer::step() {
    const AdamConfig& c = state_.config;
    state_.step_count += 1;
    const double t = static_cast<double>(state_.step_count);
    const double bc1 = 1.0 - std::pow(c.beta1, t);
    const double bc2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
        Tensor& p = params_[pi];
        auto g = p.ensure_grad();  // absent gradient counts as zero
        auto v = p.values();
        auto& m1 = state_.first_moment[pi];
        auto& m2 = state_.second_moment[pi];
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double gi = g[i];
            m1[i] = c.beta1 * m1[i] + (1.0 - c.beta1) * gi;
            m2[i] = c.beta2 * m2[i] + (1.0 - c.beta2) * gi * gi;
            const double mhat = m1[i] / bc1;
            const double vhat = m2[i] / bc2;
            v[i] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
        }
    }
}

void AdamOptimizer::zero_grad() {
    for (auto& p : params_) p.zero_grad();
}

}  // namespace regressgan

#pragma once

#include <cstdint>
#include <vector>

#include "regressgan/datasets.hpp"
#include "regressgan/matrix.hpp"

namespace regressgan {

struct RbfKernelParams {
    double length_scale = 1.0;
    double signal_variance = 1.0;
    double noise_variance = 0.0;
};

// K[i,j] = signal_variance * exp(-||a_i - b_j||^2 / (2 l^2))
Matrix rbf_kernel(const Matrix& a, const Matrix& b, const RbfKernelParams& params);

struct GpModel {
    Matrix train_inputs;        // [m, d]
    Matrix cholesky_factor;     // lower [m, m] of K + (noise + jitter) I
    std::vector<double> alpha;  // (K + noise I)^{-1} (y - mean)
    RbfKernelParams kernel;
    double target_mean = 0.0;
    double jitter_used = 0.0;
    double log_marginal = 0.0;
};

// Exact fit via Cholesky. Jitter starts at 1e-10 and multiplies by 10 up to
// 1e-4 on factorization failure; past that, IllConditionedError reporting
// the length scale and m.
GpModel gp_fit(const Matrix& x, std::span<const double> y, const RbfKernelParams& params);

struct GpPrediction {
    std::vector<double> mean;
    std::vector<double> variance;  // latent variance, floored at 0
};

GpPrediction gp_predict(const GpModel& model, const Matrix& x_new);

// Posterior mean only; skips the triangular solves that feed the variance.
std::vector<double> gp_predict_mean(const GpModel& model, const Matrix& x_new);

struct GpGrid {
    std::vector<double> length_scales;
    std::vector<double> noise_variances;
    double signal_variance = 1.0;

    // length_scale in {0.1, 0.3, 1, 3, 10} * sqrt(d),
    // noise_variance in {1e-4, 1e-2, 1e-1, 1} * var(y), signal_variance = var(y).
    static GpGrid defaults(std::size_t dim, double target_variance);
};

// Grid search maximizing the log marginal likelihood; deterministic
// first-grid-point tie-break. Grid points that fail to factorize are skipped;
// if all fail, IllConditionedError.
RbfKernelParams hyperparam_search(const Matrix& x, std::span<const double> y, const GpGrid& grid);

// Uniform seeded subsample of the train split down to cap rows; val/test and
// the feature matrix are untouched.
TabularDataset subsample_for_gp(const TabularDataset& ds, std::size_t cap, std::uint64_t seed);

}  // namespace regressgan

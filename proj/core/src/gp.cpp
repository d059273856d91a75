#include "regressgan/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "regressgan/errors.hpp"

namespace regressgan {

Matrix rbf_kernel(const Matrix& a, const Matrix& b, const RbfKernelParams& params) {
    if (a.cols() != b.cols()) {
        throw ShapeError("rbf_kernel: dim mismatch " + std::to_string(a.cols()) + " vs " +
                         std::to_string(b.cols()));
    }
    const double inv2l2 = 1.0 / (2.0 * params.length_scale * params.length_scale);
    Matrix k(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ra = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            k.at(i, j) = params.signal_variance * std::exp(-squared_distance(ra, b.row(j)) * inv2l2);
        }
    }
    return k;
}

GpModel gp_fit(const Matrix& x, std::span<const double> y, const RbfKernelParams& params) {
    const std::size_t m = x.rows();
    if (m < 1 || y.size() != m) throw ShapeError("gp_fit: need m >= 1 rows and matching targets");
    for (double v : y) {
        if (!std::isfinite(v)) throw NumericError("gp_fit: non-finite target");
    }
    for (double v : x.data()) {
        if (!std::isfinite(v)) throw NumericError("gp_fit: non-finite input");
    }

    GpModel model;
    model.train_inputs = x;
    model.kernel = params;
    model.target_mean = mean(y);

    std::vector<double> yc(y.begin(), y.end());
    for (auto& v : yc) v -= model.target_mean;

    Matrix k = rbf_kernel(x, x, params);
    Matrix lower;
    double jitter = 1e-10;
    bool ok = false;
    for (;;) {
        Matrix kj = k;
        for (std::size_t i = 0; i < m; ++i) kj.at(i, i) += params.noise_variance + jitter;
        if (cholesky_lower(kj, lower)) {
            ok = true;
            break;
        }
        if (jitter >= 1e-4) break;
        jitter *= 10.0;
    }
    if (!ok) {
        throw IllConditionedError("gp_fit: Cholesky failed at max jitter (length_scale=" +
                                  std::to_string(params.length_scale) +
                                  ", m=" + std::to_string(m) + ")");
    }
    model.jitter_used = jitter;
    model.cholesky_factor = std::move(lower);
    model.alpha = cholesky_solve(model.cholesky_factor, yc);

    double fit_term = 0.0;
    for (std::size_t i = 0; i < m; ++i) fit_term += yc[i] * model.alpha[i];
    double logdet_half = 0.0;
    for (std::size_t i = 0; i < m; ++i) logdet_half += std::log(model.cholesky_factor.at(i, i));
    model.log_marginal = -0.5 * fit_term - logdet_half -
                         0.5 * static_cast<double>(m) * std::log(2.0 * M_PI);
    return model;
}

GpPrediction gp_predict(const GpModel& model, const Matrix& x_new) {
    if (x_new.cols() != model.train_inputs.cols()) {
        throw ShapeError("gp_predict: dim mismatch");
    }
    const std::size_t m = model.train_inputs.rows();
    const std::size_t q = x_new.rows();
    GpPrediction out;
    out.mean.assign(q, 0.0);
    out.variance.assign(q, 0.0);

    // Chunk new points: K(X, X*) columns and their triangular solves.
    constexpr std::size_t kChunk = 512;
    std::vector<double> kcol(m);
    for (std::size_t start = 0; start < q; start += kChunk) {
        const std::size_t rows = std::min(kChunk, q - start);
        for (std::size_t r = 0; r < rows; ++r) {
            auto xr = x_new.row(start + r);
            const double inv2l2 =
                1.0 / (2.0 * model.kernel.length_scale * model.kernel.length_scale);
            for (std::size_t i = 0; i < m; ++i) {
                kcol[i] = model.kernel.signal_variance *
                          std::exp(-squared_distance(model.train_inputs.row(i), xr) * inv2l2);
            }
            double mu = 0.0;
            for (std::size_t i = 0; i < m; ++i) mu += kcol[i] * model.alpha[i];
            out.mean[start + r] = mu + model.target_mean;

            const std::vector<double> v = solve_lower(model.cholesky_factor, kcol);
            double vs = 0.0;
            for (double vv : v) vs += vv * vv;
            out.variance[start + r] = std::max(0.0, model.kernel.signal_variance - vs);
        }
    }
    return out;
}

std::vector<double> gp_predict_mean(const GpModel& model, const Matrix& x_new) {
    if (x_new.cols() != model.train_inputs.cols()) {
        throw ShapeError("gp_predict_mean: dim mismatch");
    }
    const std::size_t m = model.train_inputs.rows();
    const double inv2l2 = 1.0 / (2.0 * model.kernel.length_scale * model.kernel.length_scale);
    std::vector<double> out(x_new.rows());
    for (std::size_t r = 0; r < x_new.rows(); ++r) {
        auto xr = x_new.row(r);
        double mu = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            mu += model.alpha[i] * model.kernel.signal_variance *
                  std::exp(-squared_distance(model.train_inputs.row(i), xr) * inv2l2);
        }
        out[r] = mu + model.target_mean;
    }
    return out;
}

GpGrid GpGrid::defaults(std::size_t dim, double target_variance) {
    const double sqrt_d = std::sqrt(static_cast<double>(dim));
    const double vy = target_variance > 0.0 ? target_variance : 1.0;
    GpGrid grid;
    for (double f : {0.1, 0.3, 1.0, 3.0, 10.0}) grid.length_scales.push_back(f * sqrt_d);
    for (double f : {1e-4, 1e-2, 1e-1, 1.0}) grid.noise_variances.push_back(f * vy);
    grid.signal_variance = vy;
    return grid;
}

RbfKernelParams hyperparam_search(const Matrix& x, std::span<const double> y, const GpGrid& grid) {
    if (grid.length_scales.empty() || grid.noise_variances.empty()) {
        throw ContractError("hyperparam_search: empty grid");
    }
    bool found = false;
    RbfKernelParams best;
    double best_lml = 0.0;
    for (double l : grid.length_scales) {
        for (double nv : grid.noise_variances) {
            RbfKernelParams p{l, grid.signal_variance, nv};
            GpModel model;
            try {
                model = gp_fit(x, y, p);
            } catch (const IllConditionedError&) {
                continue;
            }
            if (!found || model.log_marginal > best_lml) {
                found = true;
                best = p;
                best_lml = model.log_marginal;
            }
        }
    }
    if (!found) throw IllConditionedError("hyperparam_search: every grid point failed to factorize");
    return best;
}

TabularDataset subsample_for_gp(const TabularDataset& ds, std::size_t cap, std::uint64_t seed) {
    if (cap < 1) throw DomainError("subsample_for_gp: cap >= 1");
    TabularDataset out = ds;
    if (out.split.train.size() <= cap) return out;
    std::vector<std::size_t> idx = out.split.train;
    RngStream rng(derive_seed(seed, {"gp", "subsample"}));
    rng.shuffle(idx);
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    out.split.train = std::move(idx);
    return out;
}

}  // namespace regressgan

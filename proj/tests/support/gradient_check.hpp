#pragma once

// Finite-difference gradient oracle shared by the unit and acceptance suites.
// Independent of the tape's backward rules: it only re-runs forward passes.

#include <cmath>
#include <functional>
#include <vector>

#include "regressgan/autodiff.hpp"

namespace regressgan::testing {

// forward() must rebuild the computation from current parameter values and
// return the scalar loss value (no backward involved).
using ForwardFn = std::function<double()>;

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
};

// Central differences with step h against the grads already stored on the
// parameters. Relative error uses a unit floor: tiny gradients are compared
// absolutely, at 1e-5 * 1.
inline GradCheckResult finite_difference_check(const std::vector<Tensor>& params,
                                               const ForwardFn& forward, double h = 1e-5) {
    GradCheckResult result;
    for (Tensor p : params) {
        auto values = p.values();
        auto grads = p.grad();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double saved = values[i];
            values[i] = saved + h;
            const double up = forward();
            values[i] = saved - h;
            const double down = forward();
            values[i] = saved;
            const double fd = (up - down) / (2.0 * h);
            const double g = grads[i];
            const double denom = std::max({1.0, std::fabs(fd), std::fabs(g)});
            result.max_rel_error = std::max(result.max_rel_error, std::fabs(fd - g) / denom);
            ++result.checked;
        }
    }
    return result;
}

}  // namespace regressgan::testing

#include "regressgan/matrix.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "regressgan/errors.hpp"

namespace regressgan {

Matrix Matrix::from_data(std::size_t rows, std::size_t cols, std::vector<double> data) {
    if (data.size() != rows * cols) {
        throw ShapeError("Matrix::from_data: " + std::to_string(data.size()) + " values for " +
                         std::to_string(rows) + "x" + std::to_string(cols));
    }
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: [" + std::to_string(a.rows()) + "," + std::to_string(a.cols()) +
                         "] x [" + std::to_string(b.rows()) + "," + std::to_string(b.cols()) + "]");
    }
    Matrix c(a.rows(), b.cols(), 0.0);
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* crow = c.data().data() + i * n;
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double av = a.at(i, k);
            const double* brow = b.data().data() + k * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
    return c;
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> idx) {
    Matrix out(idx.size(), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        auto src = m.row(idx[i]);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) dst[j] = src[j];
    }
    return out;
}

std::vector<double> gather(std::span<const double> v, std::span<const std::size_t> idx) {
    std::vector<double> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
    return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
    if (v.empty()) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

bool cholesky_lower(const Matrix& a, Matrix& lower) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw ShapeError("cholesky_lower: matrix not square");
    if (lower.rows() != n || lower.cols() != n) lower = Matrix(n, n, 0.0);
    else std::fill(lower.data().begin(), lower.data().end(), 0.0);

    for (std::size_t j = 0; j < n; ++j) {
        const double* lj = lower.data().data() + j * n;
        double diag = a.at(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= lj[k] * lj[k];
        if (!(diag > 0.0) || !std::isfinite(diag)) return false;
        const double ljj = std::sqrt(diag);
        lower.at(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            const double* li = lower.data().data() + i * n;
            double s = a.at(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
            lower.at(i, j) = s / ljj;
        }
    }
    return true;
}

std::vector<double> solve_lower(const Matrix& lower, std::span<const double> b) {
    const std::size_t n = lower.rows();
    if (b.size() != n) throw ShapeError("solve_lower: size mismatch");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* li = lower.data().data() + i * n;
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= li[k] * x[k];
        x[i] = s / li[i];
    }
    return x;
}

std::vector<double> solve_lower_transposed(const Matrix& lower, std::span<const double> b) {
    const std::size_t n = lower.rows();
    if (b.size() != n) throw ShapeError("solve_lower_transposed: size mismatch");
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= lower.at(k, ii) * x[k];
        x[ii] = s / lower.at(ii, ii);
    }
    return x;
}

std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b) {
    return solve_lower_transposed(lower, solve_lower(lower, b));
}

}  // namespace regressgan

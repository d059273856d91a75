#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace regressgan {

// Dense row-major matrix of doubles. Plain-value math shared by the dataset,
// evaluation and GP code paths; gradient-carrying math lives in autodiff.hpp.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_data(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// c = a * b
Matrix matmul(const Matrix& a, const Matrix& b);

// Rows of m selected by idx, in idx order.
Matrix gather_rows(const Matrix& m, std::span<const std::size_t> idx);

std::vector<double> gather(std::span<const double> v, std::span<const std::size_t> idx);

double squared_distance(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> v);
double variance(std::span<const double> v);  // population variance

// In-place lower Cholesky of a symmetric positive definite matrix.
// Returns false when a non-positive pivot appears; `lower` is then garbage.
bool cholesky_lower(const Matrix& a, Matrix& lower);

// Solve L x = b.
std::vector<double> solve_lower(const Matrix& lower, std::span<const double> b);
// Solve L^T x = b.
std::vector<double> solve_lower_transposed(const Matrix& lower, std::span<const double> b);
// Solve (L L^T) x = b.
std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b);

}  // namespace regressgan

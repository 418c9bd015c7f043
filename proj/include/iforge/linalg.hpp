#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace iforge {

// Row-major dense matrix of doubles.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }
    std::span<const double> row_span(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix& other) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// y = A x
std::vector<double> matvec(const Matrix& a, std::span<const double> x);

// Lower-triangular Cholesky factor of a symmetric matrix. Returns false when
// the matrix is not numerically positive definite (pivot at or below
// rel_tol * max diagonal).
bool cholesky(const Matrix& a, Matrix& lower, double rel_tol = 1e-12);

// Solves L L^T x = b given the Cholesky factor L.
std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b);

// Inverse of a lower-triangular matrix.
Matrix invert_lower_triangular(const Matrix& lower);

// Eigenvalues (ascending) and eigenvectors (columns) of a symmetric matrix
// via cyclic Jacobi rotations.
void symmetric_eigen(const Matrix& a, std::vector<double>& eigenvalues, Matrix& eigenvectors);

}  // namespace iforge

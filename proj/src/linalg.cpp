#include "iforge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iforge {

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
    if (x.size() != a.cols()) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* r = a.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += r[j] * x[j];
        y[i] = acc;
    }
    return y;
}

bool cholesky(const Matrix& a, Matrix& lower, double rel_tol) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("cholesky: matrix not square");

    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
    const double pivot_floor = rel_tol * std::max(max_diag, 1e-300);

    lower = Matrix(n, n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= lower(j, k) * lower(j, k);
        if (!(diag > pivot_floor)) return false;
        const double ljj = std::sqrt(diag);
        lower(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = a(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= lower(i, k) * lower(j, k);
            lower(i, j) = acc / ljj;
        }
    }
    return true;
}

std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b) {
    const std::size_t n = lower.rows();
    if (b.size() != n) throw std::invalid_argument("cholesky_solve: dimension mismatch");
    // Forward: L z = b
    std::vector<double> z(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = b[i];
        for (std::size_t k = 0; k < i; ++k) acc -= lower(i, k) * z[k];
        z[i] = acc / lower(i, i);
    }
    // Back: L^T x = z
    std::vector<double> x(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = z[ii];
        for (std::size_t k = ii + 1; k < n; ++k) acc -= lower(k, ii) * x[k];
        x[ii] = acc / lower(ii, ii);
    }
    return x;
}

Matrix invert_lower_triangular(const Matrix& lower) {
    const std::size_t n = lower.rows();
    Matrix inv(n, n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        inv(j, j) = 1.0 / lower(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t k = j; k < i; ++k) acc += lower(i, k) * inv(k, j);
            inv(i, j) = -acc / lower(i, i);
        }
    }
    return inv;
}

void symmetric_eigen(const Matrix& a, std::vector<double>& eigenvalues, Matrix& eigenvectors) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("symmetric_eigen: matrix not square");

    Matrix m = a;
    eigenvectors = Matrix(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) eigenvectors(i, i) = 1.0;

    for (int sweep = 0; sweep < 128; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-30) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p);
                    const double mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k);
                    const double mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = eigenvectors(k, p);
                    const double vkq = eigenvectors(k, q);
                    eigenvectors(k, p) = c * vkp - s * vkq;
                    eigenvectors(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    eigenvalues.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = m(i, i);

    // Sort ascending, carrying eigenvector columns along.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return eigenvalues[x] < eigenvalues[y]; });
    std::vector<double> sorted_vals(n);
    Matrix sorted_vecs(n, n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        sorted_vals[c] = eigenvalues[order[c]];
        for (std::size_t r = 0; r < n; ++r) sorted_vecs(r, c) = eigenvectors(r, order[c]);
    }
    eigenvalues = std::move(sorted_vals);
    eigenvectors = std::move(sorted_vecs);
}

}  // namespace iforge

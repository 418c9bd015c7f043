#include "iforge/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "iforge/io.hpp"
#include "iforge/rng.hpp"

namespace iforge {

namespace {

constexpr std::uint64_t kRegressorSalt = 0x78647277ULL;
constexpr std::uint64_t kNoiseSalt = 0x65707331ULL;

double relu(double v) { return v > 0.0 ? v : 0.0; }

std::string column_label(std::size_t j, std::span<const std::string> names) {
    if (j < names.size()) return "'" + names[j] + "'";
    return std::to_string(j);
}

Dataset generate(std::size_t n, std::uint64_t seed, std::span<const double> col_means,
                 double noise_sd, double (*response)(std::span<const double>)) {
    if (n < 1) throw std::invalid_argument("dgp: n must be positive");
    const std::size_t d = col_means.size();

    Rng rng_x(derive_seed(seed, kRegressorSalt));
    Matrix raw(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        double* row = raw.row(i);
        for (std::size_t j = 0; j < d; ++j) row[j] = rng_x.normal(col_means[j], 1.0);
    }

    Dataset data;
    data.X = impose_correlation(raw, CorrelationTarget::simulation_default());
    data.feature_names = {"x1", "x2", "x3", "x4", "x5"};
    data.f_true.resize(n);
    data.y.resize(n);
    Rng rng_eps(derive_seed(seed, kNoiseSalt));
    for (std::size_t i = 0; i < n; ++i) {
        data.f_true[i] = response(data.X.row_span(i));
        data.y[i] = data.f_true[i] + rng_eps.normal(0.0, noise_sd);
    }
    return data;
}

}  // namespace

CorrelationTarget CorrelationTarget::simulation_default() {
    static const double raw[5][5] = {
        {1.0, 0.5, 0.6, 0.7, 0.5},
        {0.5, 1.0, 0.7, 0.8, 0.5},
        {0.6, 0.7, 1.0, 0.7, 0.5},
        {0.7, 0.8, 0.7, 1.0, 0.8},
        {0.9, 0.5, 0.6, 0.8, 1.0},
    };
    Matrix m(5, 5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) m(i, j) = raw[i][j];
    return from_raw(m);
}

CorrelationTarget CorrelationTarget::from_raw(const Matrix& raw) {
    const std::size_t d = raw.rows();
    if (raw.cols() != d) throw std::invalid_argument("CorrelationTarget: matrix not square");
    for (std::size_t i = 0; i < d; ++i) {
        if (std::abs(raw(i, i) - 1.0) > 1e-12)
            throw std::invalid_argument("CorrelationTarget: diagonal must be 1");
        for (std::size_t j = 0; j < d; ++j)
            if (!(raw(i, j) >= -1.0 && raw(i, j) <= 1.0))
                throw std::invalid_argument("CorrelationTarget: entries must lie in [-1, 1]");
    }

    CorrelationTarget target;
    target.C = Matrix(d, d);
    bool asymmetric = false;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            // Lower triangle wins: the Cholesky factorization consumes it.
            const double v = (i >= j) ? raw(i, j) : raw(j, i);
            target.C(i, j) = v;
            if (i < j && raw(i, j) != raw(j, i)) asymmetric = true;
        }
    }
    target.symmetrized = asymmetric;

    Matrix chol_check;
    if (!cholesky(target.C, chol_check)) {
        // Nearest-PD fallback: clip eigenvalues, then restore the unit diagonal.
        std::vector<double> evals;
        Matrix evecs;
        symmetric_eigen(target.C, evals, evecs);
        std::cerr << "warning: correlation target not positive definite (min eigenvalue "
                  << evals.front() << "); clipping eigenvalues at 1e-6\n";
        Matrix rebuilt(d, d, 0.0);
        for (std::size_t k = 0; k < d; ++k) {
            const double lambda = std::max(evals[k], 1e-6);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    rebuilt(i, j) += lambda * evecs(i, k) * evecs(j, k);
        }
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                target.C(i, j) = rebuilt(i, j) / std::sqrt(rebuilt(i, i) * rebuilt(j, j));
        target.clipped = true;
        if (!cholesky(target.C, chol_check))
            throw std::runtime_error("CorrelationTarget: clipping failed to restore definiteness");
    }
    return target;
}

Matrix impose_correlation(const Matrix& X, const CorrelationTarget& target) {
    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    if (target.C.rows() != d)
        throw std::invalid_argument("impose_correlation: dimension mismatch with target");
    if (n < d) throw std::invalid_argument("impose_correlation: need at least d rows");

    const ColumnStats stats = column_stats(X);
    for (std::size_t j = 0; j < d; ++j)
        if (stats.stddev[j] == 0.0)
            throw std::runtime_error("impose_correlation: column " + std::to_string(j) +
                                     " has zero variance");

    Matrix v = X;
    standardize_columns(v, stats);

    // Empirical correlation of the standardized columns.
    Matrix sigma(d, d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = v.row(i);
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = a; b < d; ++b) sigma(a, b) += row[a] * row[b];
    }
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
            sigma(a, b) /= static_cast<double>(n);
            sigma(b, a) = sigma(a, b);
        }

    Matrix whitener;
    if (!cholesky(sigma, whitener)) {
        std::vector<double> evals;
        Matrix evecs;
        symmetric_eigen(sigma, evals, evecs);
        throw std::runtime_error(
            "impose_correlation: empirical correlation not positive definite (min eigenvalue " +
            std::to_string(evals.front()) + ")");
    }
    Matrix colorer;
    if (!cholesky(target.C, colorer)) {
        std::vector<double> evals;
        Matrix evecs;
        symmetric_eigen(target.C, evals, evecs);
        throw std::runtime_error(
            "impose_correlation: target correlation not positive definite (min eigenvalue " +
            std::to_string(evals.front()) + ")");
    }

    Matrix out(n, d);
    std::vector<double> u(d);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = v.row(i);
        // Whiten: forward-substitute A u = v.
        for (std::size_t a = 0; a < d; ++a) {
            double acc = row[a];
            for (std::size_t k = 0; k < a; ++k) acc -= whitener(a, k) * u[k];
            u[a] = acc / whitener(a, a);
        }
        // Color with the target factor, then restore scale and mean.
        double* dst = out.row(i);
        for (std::size_t a = 0; a < d; ++a) {
            double acc = 0.0;
            for (std::size_t k = 0; k <= a; ++k) acc += colorer(a, k) * u[k];
            dst[a] = acc * stats.stddev[a] + stats.mean[a];
        }
    }
    return out;
}

double nonlinear_response(std::span<const double> x) {
    if (x.size() != 5) throw std::invalid_argument("nonlinear_response: expects 5 regressors");
    const double h11 = relu(1.0 - 3.0 * x[0] - 2.0 * x[1] + 1.0 * x[2] + 5.0 * x[3] - 3.0 * x[4]);
    const double h21 = relu(1.0 + 4.0 * x[0] + 5.0 * x[1] + 2.0 * x[2] + 2.0 * x[3] - 5.0 * x[4]);
    const double h31 = relu(1.0 - 3.0 * x[0] - 4.0 * x[1] + 2.0 * x[2] - 2.0 * x[3] + 3.0 * x[4]);
    const double h12 = relu(1.0 - 1.0 * h11 + 3.0 * h21 + 5.0 * h31);
    const double h22 = relu(1.0 - 2.0 * h11 + 3.0 * h21 + 5.0 * h31);
    return 1.0 + h12 + 2.0 * h22;
}

double linear_response(std::span<const double> x) {
    if (x.size() != 5) throw std::invalid_argument("linear_response: expects 5 regressors");
    return -8.0 * x[0] + 2.0 * x[1] + 2.0 * x[2] + 2.0 * x[3] + 7.0 * x[4] + 3.0 * x[0] * x[1] -
           x[2] * x[4] + 2.0 * x[0] * x[3];
}

Dataset gen_nonlinear(std::size_t n, std::uint64_t seed) {
    const double means[5] = {-4.0, 2.0, 2.0, 2.0, 4.0};
    return generate(n, seed, means, 0.7, &nonlinear_response);
}

Dataset gen_linear(std::size_t n, std::uint64_t seed) {
    const double means[5] = {-4.0, 1.0, 1.0, 1.0, 5.0};
    return generate(n, seed, means, 1.0, &linear_response);
}

ColumnStats column_stats(const Matrix& X) {
    std::vector<std::size_t> rows(X.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return column_stats(X, rows);
}

ColumnStats column_stats(const Matrix& X, std::span<const std::size_t> rows) {
    if (rows.empty()) throw std::invalid_argument("column_stats: no rows");
    const std::size_t d = X.cols();
    ColumnStats stats;
    stats.mean.assign(d, 0.0);
    stats.stddev.assign(d, 0.0);
    for (std::size_t r : rows) {
        const double* row = X.row(r);
        for (std::size_t j = 0; j < d; ++j) stats.mean[j] += row[j];
    }
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (std::size_t j = 0; j < d; ++j) stats.mean[j] *= inv_n;
    for (std::size_t r : rows) {
        const double* row = X.row(r);
        for (std::size_t j = 0; j < d; ++j) {
            const double dlt = row[j] - stats.mean[j];
            stats.stddev[j] += dlt * dlt;
        }
    }
    for (std::size_t j = 0; j < d; ++j) stats.stddev[j] = std::sqrt(stats.stddev[j] * inv_n);
    return stats;
}

void standardize_columns(Matrix& X, const ColumnStats& stats, std::span<const std::string> names) {
    if (stats.mean.size() != X.cols())
        throw std::invalid_argument("standardize_columns: stats dimension mismatch");
    for (std::size_t j = 0; j < X.cols(); ++j)
        if (stats.stddev[j] == 0.0)
            throw std::runtime_error("normalize: zero-variance column " + column_label(j, names));
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double* row = X.row(i);
        for (std::size_t j = 0; j < X.cols(); ++j)
            row[j] = (row[j] - stats.mean[j]) / stats.stddev[j];
    }
}

void unstandardize_columns(Matrix& X, const ColumnStats& stats) {
    if (stats.mean.size() != X.cols())
        throw std::invalid_argument("unstandardize_columns: stats dimension mismatch");
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double* row = X.row(i);
        for (std::size_t j = 0; j < X.cols(); ++j)
            row[j] = row[j] * stats.stddev[j] + stats.mean[j];
    }
}

Standardization fit_standardization(const Dataset& data, std::span<const std::size_t> train_rows,
                                    bool scale_target) {
    Standardization s;
    s.x_stats = column_stats(data.X, train_rows);
    for (std::size_t j = 0; j < s.x_stats.stddev.size(); ++j)
        if (s.x_stats.stddev[j] == 0.0)
            throw std::runtime_error("normalize: zero-variance column " +
                                     column_label(j, data.feature_names));
    s.target_scaled = scale_target;
    if (scale_target) {
        double acc = 0.0;
        for (std::size_t r : train_rows) acc += data.y[r];
        s.y_mean = acc / static_cast<double>(train_rows.size());
        double sq = 0.0;
        for (std::size_t r : train_rows) {
            const double dlt = data.y[r] - s.y_mean;
            sq += dlt * dlt;
        }
        s.y_std = std::sqrt(sq / static_cast<double>(train_rows.size()));
        if (s.y_std == 0.0) throw std::runtime_error("normalize: zero-variance column 'target'");
    }
    return s;
}

Dataset apply_standardization(const Dataset& data, const Standardization& s) {
    Dataset out = data;
    standardize_columns(out.X, s.x_stats, out.feature_names);
    if (s.target_scaled)
        for (double& v : out.y) v = (v - s.y_mean) / s.y_std;
    return out;
}

double unscale_prediction(double standardized_prediction, const Standardization& s) {
    if (!s.target_scaled) return standardized_prediction;
    return standardized_prediction * s.y_std + s.y_mean;
}

std::pair<Dataset, Standardization> normalize(const Dataset& data, bool scale_target) {
    std::vector<std::size_t> rows(data.n());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const Standardization s = fit_standardization(data, rows, scale_target);
    return {apply_standardization(data, s), s};
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
    std::ostringstream out;
    for (std::size_t j = 0; j < data.dim(); ++j) {
        if (j < data.feature_names.size())
            out << data.feature_names[j] << ",";
        else
            out << "x" << (j + 1) << ",";
    }
    out << "y";
    const bool with_truth = data.f_true.size() == data.n();
    if (with_truth) out << ",f_true";
    out << "\n";
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double* row = data.X.row(i);
        for (std::size_t j = 0; j < data.dim(); ++j) out << format_double(row[j]) << ",";
        out << format_double(data.y[i]);
        if (with_truth) out << "," << format_double(data.f_true[i]);
        out << "\n";
    }
    write_text_file(path, out.str());
}

}  // namespace iforge

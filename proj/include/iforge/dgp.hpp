#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iforge/linalg.hpp"

namespace iforge {

struct Dataset {
    Matrix X;
    std::vector<double> y;
    std::vector<double> f_true;  // noiseless responses; simulation only
    std::vector<std::string> feature_names;

    std::size_t n() const { return X.rows(); }
    std::size_t dim() const { return X.cols(); }
};

struct ColumnStats {
    std::vector<double> mean;
    std::vector<double> stddev;  // population convention (divide by n)
};

// Target correlation structure for the simulated regressors. Raw input may
// be asymmetric as printed; the lower triangle wins during symmetrization.
struct CorrelationTarget {
    Matrix C;
    bool symmetrized = false;
    bool clipped = false;  // eigenvalue-clipping fallback was applied

    // The simulation study's 5x5 target, symmetrized from its lower triangle.
    static CorrelationTarget simulation_default();
    static CorrelationTarget from_raw(const Matrix& raw);
};

// Whitens columns via the inverse Cholesky factor of the empirical
// correlation, then colors via the Cholesky factor of the target. Column
// means and standard deviations are preserved.
Matrix impose_correlation(const Matrix& X, const CorrelationTarget& target);

// Noiseless responses of the two simulated processes (5 regressors).
double nonlinear_response(std::span<const double> x);
double linear_response(std::span<const double> x);

// x1~N(-4,1), x2..x4~N(2,1), x5~N(4,1), correlated; two-hidden-layer ReLU
// response plus N(0, sd=0.7) noise.
Dataset gen_nonlinear(std::size_t n, std::uint64_t seed);

// x1~N(-4,1), x2..x4~N(1,1), x5~N(5,1), correlated; linear response with
// interactions plus N(0, 1) noise.
Dataset gen_linear(std::size_t n, std::uint64_t seed);

ColumnStats column_stats(const Matrix& X);
ColumnStats column_stats(const Matrix& X, std::span<const std::size_t> rows);

// In-place (x - mean) / std per column. Throws on zero spread, naming the
// column through `names` when provided.
void standardize_columns(Matrix& X, const ColumnStats& stats,
                         std::span<const std::string> names = {});
void unstandardize_columns(Matrix& X, const ColumnStats& stats);

struct Standardization {
    ColumnStats x_stats;
    bool target_scaled = false;
    double y_mean = 0.0;
    double y_std = 1.0;
};

// Fits on the given training rows. scale_target selects benchmark mode
// (target standardized too); simulations leave y on its raw scale.
Standardization fit_standardization(const Dataset& data, std::span<const std::size_t> train_rows,
                                    bool scale_target);
Dataset apply_standardization(const Dataset& data, const Standardization& s);
double unscale_prediction(double standardized_prediction, const Standardization& s);

// Standardizes using statistics of the full dataset.
std::pair<Dataset, Standardization> normalize(const Dataset& data, bool scale_target = false);

// CSV with header x1..xd,y and, when the dataset carries noiseless
// responses, a trailing f_true column. Full round-trip precision.
void write_dataset_csv(const Dataset& data, const std::string& path);

}  // namespace iforge

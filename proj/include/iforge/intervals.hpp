#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iforge/mask.hpp"
#include "iforge/network.hpp"

namespace iforge {

enum class Method {
    delta,
    boot_percentile,
    boot_normal,
    boot_bias_corrected,
    boot_mean,
    mc_dropout,
    extra_nn,
};

std::string method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

struct PredictionInterval {
    double center = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double alpha = 0.0;
    Method method = Method::extra_nn;
    double epistemic_var = 0.0;
    double aleatoric_var = 0.0;
    // Delta method only: ridge added to J^T J when the plain factorization failed.
    double ridge = 0.0;

    bool contains(double y) const { return y >= lower && y <= upper; }
    double width() const { return upper - lower; }
};

// T independently trained parameter snapshots sharing one architecture.
// extra_nn ensembles carry the fixed structural mask of each member.
struct Ensemble {
    NetworkSpec spec;
    Method method = Method::extra_nn;
    double retain_prob = 1.0;
    std::vector<Parameters> members;
    std::vector<Mask> masks;
    std::vector<std::uint64_t> member_seeds;

    std::size_t size() const { return members.size(); }
};

struct CoverageReport {
    std::vector<double> alphas;
    std::vector<double> miss_rates;
    double mape = 0.0;
    double mspe = 0.0;
    double rmspe = 0.0;
    std::size_t n_test = 0;
};

// Mean squared residual over a sample (homoscedastic aleatoric estimate).
double aleatoric_variance(std::span<const double> predictions, std::span<const double> targets);

// First-order Taylor (delta method) machinery. The training Jacobian cross
// product J^T J is accumulated and factored once; intervals per test point
// reuse the factorization. When the plain factorization fails, a ridge of
// 1e-8 * trace(J^T J) / r is added and recorded in the result metadata.
class DeltaEstimator {
  public:
    DeltaEstimator(const NetworkSpec& spec, const Parameters& params, const Matrix& X_train,
                   std::span<const double> y_train);

    PredictionInterval interval(std::span<const double> x, double alpha) const;
    // S = f'^T (J^T J)^{-1} f', the delta-method quadratic form.
    double leverage(std::span<const double> gradient) const;
    double ridge() const { return ridge_; }
    double sigma_e_sq() const { return sigma_e_sq_; }

  private:
    NetworkSpec spec_;
    Parameters params_;
    Matrix chol_;
    double ridge_ = 0.0;
    double sigma_e_sq_ = 0.0;
};

PredictionInterval delta_interval(const NetworkSpec& spec, const Parameters& params,
                                  const Matrix& X_train, std::span<const double> y_train,
                                  std::span<const double> x, double alpha);

// Seed of ensemble member t under an ensemble-level seed.
std::uint64_t ensemble_member_seed(std::uint64_t ensemble_seed, std::size_t t);

// Resample-with-replacement row indices for one bootstrap member.
std::vector<std::size_t> bootstrap_resample_indices(std::size_t n, std::uint64_t member_seed);

Parameters fit_bootstrap_member(const Matrix& X, std::span<const double> y,
                                const NetworkSpec& spec, const TrainConfig& config,
                                std::uint64_t member_seed);

// T networks, each trained on an n-sized resample of the training set with
// fresh weight seeds. config.seed is the ensemble-level seed.
Ensemble bootstrap_fit(const Matrix& X, std::span<const double> y, int T,
                       const NetworkSpec& spec, const TrainConfig& config);

struct ExtraMember {
    Parameters params;
    Mask mask;
};

ExtraMember fit_extra_member(const Matrix& X, std::span<const double> y, const NetworkSpec& spec,
                             const TrainConfig& config, double p, std::uint64_t member_seed);

// T fixed structural masks drawn prior to training, one thinned network
// independently trained per mask on the full training set (no resampling).
Ensemble extra_nn_fit(const Matrix& X, std::span<const double> y, int T, double p,
                      const NetworkSpec& spec, const TrainConfig& config);

struct EnsemblePrediction {
    double mean = 0.0;
    std::vector<double> member_preds;
};

// Deterministic member forward passes (fixed masks, no scaling) and their
// arithmetic average.
EnsemblePrediction ensemble_predict(const Ensemble& ensemble, std::span<const double> x);

PredictionInterval boot_percentile_interval(std::span<const double> member_preds, double alpha);
PredictionInterval boot_normal_interval(double point_pred, std::span<const double> member_preds,
                                        double sigma_e_sq, double alpha);
PredictionInterval boot_bias_corrected_interval(double point_pred,
                                                std::span<const double> member_preds,
                                                double sigma_e_sq, double alpha);
PredictionInterval boot_mean_interval(std::span<const double> member_preds,
                                      double mean_residual_var, double alpha);

// T stochastic forward passes under fresh test-time masks with inverted
// scaling; deterministic given seed. The network should have been trained
// with per-step dropout at the same p.
std::vector<double> mc_dropout_predict(const NetworkSpec& spec, const Parameters& params,
                                       std::span<const double> x, int T, double p,
                                       std::uint64_t seed);

// Center at the sample mean with variance sigma_e^2 plus the full sample
// variance of the passes (not divided by T: the passes share one trained
// network, so their cross-correlation carries full covariance mass).
PredictionInterval mc_dropout_interval(std::span<const double> samples, double sigma_e_sq,
                                       double alpha);

// Ensemble-mean interval with the 1/T-shrunk epistemic term. sigma_e^2 is
// estimated from the ensemble-mean residuals over the test sample.
PredictionInterval extra_nn_interval(std::span<const double> member_preds,
                                     std::span<const double> targets,
                                     std::span<const double> ensemble_mean_preds, double alpha);

// intervals_per_alpha[a] holds one interval per test point at alphas[a].
CoverageReport coverage_report(
    const std::vector<std::vector<PredictionInterval>>& intervals_per_alpha,
                               std::span<const double> targets,
                               std::span<const double> predictions);

struct MspeDecomposition {
    double bias_sq = 0.0;
    double variance_term = 0.0;
    double covariance_term = 0.0;

    // MSPE(ensemble mean) = bias_sq + variance_term / T + ((T-1)/T) covariance_term
    double reconstructed_mspe(std::size_t T) const;
};

// Empirical bias/variance/covariance components of the ensemble MSPE,
// measured against true function values when available, targets otherwise.
MspeDecomposition mspe_decomposition(const Matrix& member_preds, std::span<const double> targets,
                                     const std::vector<double>* true_fn_values = nullptr);

}  // namespace iforge

#include "iforge/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iforge/parallel.hpp"
#include "iforge/rng.hpp"
#include "iforge/stats.hpp"

namespace iforge {

namespace {

constexpr std::uint64_t kMemberSalt = 0x6d656d62ULL;
constexpr std::uint64_t kResampleSalt = 0x72657331ULL;
constexpr std::uint64_t kMaskDrawSalt = 0x6d736b64ULL;

PredictionInterval normal_interval(Method method, double center, double epistemic_share,
                                   double aleatoric_var, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("interval: alpha must be in (0, 1)");
    PredictionInterval pi;
    pi.method = method;
    pi.alpha = alpha;
    pi.center = center;
    pi.epistemic_var = epistemic_share;
    pi.aleatoric_var = aleatoric_var;
    const double half_width = two_sided_z(alpha) * std::sqrt(epistemic_share + aleatoric_var);
    pi.lower = center - half_width;
    pi.upper = center + half_width;
    return pi;
}

// Shared kernel of the averaged-predictor intervals: mean center, epistemic
// spread divided by T.
PredictionInterval mean_ensemble_interval(Method method, std::span<const double> member_preds,
                                          double aleatoric_var, double alpha) {
    if (member_preds.size() < 2)
        throw std::invalid_argument("interval: at least two member predictions required");
    const double center = mean(member_preds);
    const double epi = population_variance(member_preds) / static_cast<double>(member_preds.size());
    return normal_interval(method, center, epi, aleatoric_var, alpha);
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::delta: return "delta";
        case Method::boot_percentile: return "boot_percentile";
        case Method::boot_normal: return "boot_normal";
        case Method::boot_bias_corrected: return "boot_bias";
        case Method::boot_mean: return "boot_mean";
        case Method::mc_dropout: return "mc_dropout";
        case Method::extra_nn: return "extra_nn";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    if (name == "delta") return Method::delta;
    if (name == "boot_percentile") return Method::boot_percentile;
    if (name == "boot_normal") return Method::boot_normal;
    if (name == "boot_bias" || name == "boot_bias_corrected") return Method::boot_bias_corrected;
    if (name == "boot_mean") return Method::boot_mean;
    if (name == "mc_dropout") return Method::mc_dropout;
    if (name == "extra_nn") return Method::extra_nn;
    return std::nullopt;
}

double aleatoric_variance(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.empty()) throw std::invalid_argument("aleatoric_variance: empty input");
    if (predictions.size() != targets.size())
        throw std::invalid_argument("aleatoric_variance: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double r = targets[i] - predictions[i];
        acc += r * r;
    }
    return acc / static_cast<double>(predictions.size());
}

DeltaEstimator::DeltaEstimator(const NetworkSpec& spec, const Parameters& params,
                               const Matrix& X_train, std::span<const double> y_train)
    : spec_(spec), params_(params) {
    if (X_train.rows() == 0) throw std::invalid_argument("delta: empty training set");
    if (X_train.rows() != y_train.size())
        throw std::invalid_argument("delta: X/y length mismatch");

    const std::size_t r = parameter_count(spec);
    Matrix jtj(r, r, 0.0);
    double ss_res = 0.0;
    for (std::size_t i = 0; i < X_train.rows(); ++i) {
        const auto x = X_train.row_span(i);
        const std::vector<double> g = jacobian(spec_, params_, x);
        for (std::size_t a = 0; a < r; ++a) {
            if (g[a] == 0.0) continue;
            double* row = jtj.row(a);
            for (std::size_t b = 0; b < r; ++b) row[b] += g[a] * g[b];
        }
        const double resid = y_train[i] - predict(spec_, params_, x);
        ss_res += resid * resid;
    }
    sigma_e_sq_ = ss_res / static_cast<double>(X_train.rows());

    if (!cholesky(jtj, chol_)) {
        double trace = 0.0;
        for (std::size_t a = 0; a < r; ++a) trace += jtj(a, a);
        ridge_ = 1e-8 * trace / static_cast<double>(r);
        for (std::size_t a = 0; a < r; ++a) jtj(a, a) += ridge_;
        if (!cholesky(jtj, chol_)) throw std::runtime_error("degenerate Jacobian");
    }
}

double DeltaEstimator::leverage(std::span<const double> gradient) const {
    if (gradient.size() != chol_.rows())
        throw std::invalid_argument("delta: gradient length mismatch");
    const std::vector<double> solved = cholesky_solve(chol_, gradient);
    double s = 0.0;
    for (std::size_t a = 0; a < gradient.size(); ++a) s += gradient[a] * solved[a];
    return std::max(s, 0.0);
}

PredictionInterval DeltaEstimator::interval(std::span<const double> x, double alpha) const {
    const double s = leverage(jacobian(spec_, params_, x));
    PredictionInterval pi = normal_interval(Method::delta, predict(spec_, params_, x),
                                            sigma_e_sq_ * s, sigma_e_sq_, alpha);
    pi.ridge = ridge_;
    return pi;
}

PredictionInterval delta_interval(const NetworkSpec& spec, const Parameters& params,
                                  const Matrix& X_train, std::span<const double> y_train,
                                  std::span<const double> x, double alpha) {
    return DeltaEstimator(spec, params, X_train, y_train).interval(x, alpha);
}

std::uint64_t ensemble_member_seed(std::uint64_t ensemble_seed, std::size_t t) {
    return derive_seed(derive_seed(ensemble_seed, kMemberSalt), t);
}

std::vector<std::size_t> bootstrap_resample_indices(std::size_t n, std::uint64_t member_seed) {
    Rng rng(derive_seed(member_seed, kResampleSalt));
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = rng.uniform_index(n);
    return idx;
}

Parameters fit_bootstrap_member(const Matrix& X, std::span<const double> y,
                                const NetworkSpec& spec, const TrainConfig& config,
                                std::uint64_t member_seed) {
    const std::vector<std::size_t> idx = bootstrap_resample_indices(X.rows(), member_seed);
    Matrix Xb(idx.size(), X.cols());
    std::vector<double> yb(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const double* src = X.row(idx[i]);
        std::copy(src, src + X.cols(), Xb.row(i));
        yb[i] = y[idx[i]];
    }
    TrainConfig member_config = config;
    member_config.seed = member_seed;
    return train_with_restarts(spec, Xb, yb, member_config);
}

Ensemble bootstrap_fit(const Matrix& X, std::span<const double> y, int T,
                       const NetworkSpec& spec, const TrainConfig& config) {
    if (T < 2) throw std::invalid_argument("bootstrap_fit: T must be at least 2");
    Ensemble ens;
    ens.spec = spec;
    ens.method = Method::boot_mean;
    ens.members.resize(static_cast<std::size_t>(T));
    ens.member_seeds.resize(static_cast<std::size_t>(T));
    for (std::size_t t = 0; t < ens.member_seeds.size(); ++t)
        ens.member_seeds[t] = ensemble_member_seed(config.seed, t);
    parallel_for(ens.members.size(), [&](std::size_t t) {
        ens.members[t] = fit_bootstrap_member(X, y, spec, config, ens.member_seeds[t]);
    });
    return ens;
}

ExtraMember fit_extra_member(const Matrix& X, std::span<const double> y, const NetworkSpec& spec,
                             const TrainConfig& config, double p, std::uint64_t member_seed) {
    ExtraMember member;
    member.mask = sample_mask(spec, p, derive_seed(member_seed, kMaskDrawSalt),
                              MaskKind::fixed_structural);
    TrainConfig member_config = config;
    member_config.seed = member_seed;
    member.params =
        train_with_restarts(spec, X, y, member_config, MaskMode::fixed, &member.mask);
    return member;
}

Ensemble extra_nn_fit(const Matrix& X, std::span<const double> y, int T, double p,
                      const NetworkSpec& spec, const TrainConfig& config) {
    if (T < 2) throw std::invalid_argument("extra_nn_fit: T must be at least 2");
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("extra_nn_fit: retention probability must be in (0, 1]");
    Ensemble ens;
    ens.spec = spec;
    ens.method = Method::extra_nn;
    ens.retain_prob = p;
    ens.members.resize(static_cast<std::size_t>(T));
    ens.masks.resize(static_cast<std::size_t>(T));
    ens.member_seeds.resize(static_cast<std::size_t>(T));
    for (std::size_t t = 0; t < ens.member_seeds.size(); ++t)
        ens.member_seeds[t] = ensemble_member_seed(config.seed, t);
    parallel_for(ens.members.size(), [&](std::size_t t) {
        ExtraMember member = fit_extra_member(X, y, spec, config, p, ens.member_seeds[t]);
        ens.members[t] = std::move(member.params);
        ens.masks[t] = std::move(member.mask);
    });
    return ens;
}

EnsemblePrediction ensemble_predict(const Ensemble& ensemble, std::span<const double> x) {
    if (ensemble.members.empty()) throw std::invalid_argument("ensemble_predict: empty ensemble");
    EnsemblePrediction out;
    out.member_preds.resize(ensemble.members.size());
    for (std::size_t t = 0; t < ensemble.members.size(); ++t) {
        const Mask* mask = ensemble.masks.empty() ? nullptr : &ensemble.masks[t];
        out.member_preds[t] = forward(ensemble.spec, ensemble.members[t], x, mask).prediction;
    }
    out.mean = mean(out.member_preds);
    return out;
}

PredictionInterval boot_percentile_interval(std::span<const double> member_preds, double alpha) {
    if (member_preds.size() < 2)
        throw std::invalid_argument("boot_percentile_interval: T must be at least 2");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("interval: alpha must be in (0, 1)");
    std::vector<double> sorted(member_preds.begin(), member_preds.end());
    std::sort(sorted.begin(), sorted.end());
    PredictionInterval pi;
    pi.method = Method::boot_percentile;
    pi.alpha = alpha;
    pi.center = mean(member_preds);
    pi.lower = interpolated_quantile_sorted(sorted, alpha / 2.0);
    pi.upper = interpolated_quantile_sorted(sorted, 1.0 - alpha / 2.0);
    pi.epistemic_var = population_variance(member_preds);
    pi.aleatoric_var = 0.0;
    return pi;
}

PredictionInterval boot_normal_interval(double point_pred, std::span<const double> member_preds,
                                        double sigma_e_sq, double alpha) {
    if (member_preds.size() < 2)
        throw std::invalid_argument("boot_normal_interval: T must be at least 2");
    return normal_interval(Method::boot_normal, point_pred, population_variance(member_preds),
                           sigma_e_sq, alpha);
}

PredictionInterval boot_bias_corrected_interval(double point_pred,
                                                std::span<const double> member_preds,
                                                double sigma_e_sq, double alpha) {
    if (member_preds.size() < 2)
        throw std::invalid_argument("boot_bias_corrected_interval: T must be at least 2");
    const double center = 2.0 * point_pred - mean(member_preds);
    return normal_interval(Method::boot_bias_corrected, center,
                           population_variance(member_preds), sigma_e_sq, alpha);
}

PredictionInterval boot_mean_interval(std::span<const double> member_preds,
                                      double mean_residual_var, double alpha) {
    return mean_ensemble_interval(Method::boot_mean, member_preds, mean_residual_var, alpha);
}

std::vector<double> mc_dropout_predict(const NetworkSpec& spec, const Parameters& params,
                                       std::span<const double> x, int T, double p,
                                       std::uint64_t seed) {
    if (T < 1) throw std::invalid_argument("mc_dropout_predict: T must be positive");
    std::vector<double> samples(static_cast<std::size_t>(T));
    for (std::size_t t = 0; t < samples.size(); ++t) {
        const Mask mask =
            sample_mask(spec, p, derive_seed(seed, t), MaskKind::test_stochastic);
        samples[t] = forward(spec, params, x, &mask).prediction;
    }
    return samples;
}

PredictionInterval mc_dropout_interval(std::span<const double> samples, double sigma_e_sq,
                                       double alpha) {
    if (samples.size() < 2)
        throw std::invalid_argument("mc_dropout_interval: T must be at least 2");
    return normal_interval(Method::mc_dropout, mean(samples), population_variance(samples),
                           sigma_e_sq, alpha);
}

PredictionInterval extra_nn_interval(std::span<const double> member_preds,
                                     std::span<const double> targets,
                                     std::span<const double> ensemble_mean_preds, double alpha) {
    const double sigma_e_sq = aleatoric_variance(ensemble_mean_preds, targets);
    return mean_ensemble_interval(Method::extra_nn, member_preds, sigma_e_sq, alpha);
}

CoverageReport coverage_report(
    const std::vector<std::vector<PredictionInterval>>& intervals_per_alpha,
    std::span<const double> targets, std::span<const double> predictions) {
    if (targets.size() != predictions.size())
        throw std::invalid_argument("coverage_report: targets/predictions length mismatch");
    if (targets.empty()) throw std::invalid_argument("coverage_report: empty test sample");

    CoverageReport report;
    report.n_test = targets.size();
    for (const auto& intervals : intervals_per_alpha) {
        if (intervals.size() != targets.size())
            throw std::invalid_argument("coverage_report: interval/target length mismatch");
        std::size_t misses = 0;
        for (std::size_t i = 0; i < intervals.size(); ++i)
            if (!intervals[i].contains(targets[i])) ++misses;
        report.alphas.push_back(intervals.front().alpha);
        report.miss_rates.push_back(static_cast<double>(misses) /
                                    static_cast<double>(targets.size()));
    }

    double abs_acc = 0.0;
    double sq_acc = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double e = targets[i] - predictions[i];
        abs_acc += std::abs(e);
        sq_acc += e * e;
    }
    report.mape = abs_acc / static_cast<double>(targets.size());
    report.mspe = sq_acc / static_cast<double>(targets.size());
    report.rmspe = std::sqrt(report.mspe);
    return report;
}

double MspeDecomposition::reconstructed_mspe(std::size_t T) const {
    if (T == 0) return 0.0;
    const double t = static_cast<double>(T);
    return bias_sq + variance_term / t + (t - 1.0) / t * covariance_term;
}

MspeDecomposition mspe_decomposition(const Matrix& member_preds, std::span<const double> targets,
                                     const std::vector<double>* true_fn_values) {
    const std::size_t T = member_preds.rows();
    const std::size_t n = member_preds.cols();
    if (T == 0 || n == 0) throw std::invalid_argument("mspe_decomposition: empty predictions");
    const std::span<const double> ref =
        (true_fn_values != nullptr) ? std::span<const double>(*true_fn_values) : targets;
    if (ref.size() != n)
        throw std::invalid_argument("mspe_decomposition: reference length mismatch");

    // Member residuals against the reference; grand mean is the bias estimate.
    Matrix resid(T, n);
    double grand = 0.0;
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t i = 0; i < n; ++i) {
            resid(t, i) = member_preds(t, i) - ref[i];
            grand += resid(t, i);
        }
    grand /= static_cast<double>(T * n);

    MspeDecomposition out;
    out.bias_sq = grand * grand;

    double var_acc = 0.0;
    double cov_acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double col_sum = 0.0;
        double col_sq = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            const double a = resid(t, i) - grand;
            col_sum += a;
            col_sq += a * a;
        }
        var_acc += col_sq;
        cov_acc += col_sum * col_sum - col_sq;
    }
    out.variance_term = var_acc / static_cast<double>(T * n);
    out.covariance_term =
        (T >= 2) ? cov_acc / static_cast<double>(T * (T - 1) * n) : 0.0;
    return out;
}

}  // namespace iforge

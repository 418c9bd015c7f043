#include "iforge/experiment.hpp"

#include <cmath>
#include <stdexcept>

#include "iforge/parallel.hpp"
#include "iforge/rng.hpp"
#include "iforge/stats.hpp"

namespace iforge {

namespace {

constexpr std::uint64_t kDataSalt = 0x64617461ULL;
constexpr std::uint64_t kFitSalt = 0x66697473ULL;
constexpr std::uint64_t kBaseNetSalt = 0x62617365ULL;
constexpr std::uint64_t kMcEvalSalt = 0x6d636576ULL;
constexpr std::uint64_t kRepSalt = 0x72657073ULL;

struct ReplicationData {
    Matrix x_train;
    std::vector<double> y_train;
    Matrix x_test;
    std::vector<double> y_test;
};

// Regressors standardized on training-fold statistics; targets stay on the
// raw scale the error metrics are reported on.
ReplicationData prepare_data(const SimulationCell& cell, std::uint64_t data_seed) {
    const std::size_t total = cell.n_train + cell.n_test;
    const Dataset full = (cell.dgp == DgpKind::linear) ? gen_linear(total, data_seed)
                                                       : gen_nonlinear(total, data_seed);

    std::vector<std::size_t> train_rows(cell.n_train);
    for (std::size_t i = 0; i < cell.n_train; ++i) train_rows[i] = i;
    const ColumnStats stats = column_stats(full.X, train_rows);

    ReplicationData data;
    data.x_train = Matrix(cell.n_train, full.dim());
    data.y_train.resize(cell.n_train);
    data.x_test = Matrix(cell.n_test, full.dim());
    data.y_test.resize(cell.n_test);
    for (std::size_t i = 0; i < total; ++i) {
        const double* src = full.X.row(i);
        double* dst = (i < cell.n_train) ? data.x_train.row(i) : data.x_test.row(i - cell.n_train);
        for (std::size_t j = 0; j < full.dim(); ++j)
            dst[j] = (src[j] - stats.mean[j]) / stats.stddev[j];
        if (i < cell.n_train)
            data.y_train[i] = full.y[i];
        else
            data.y_test[i - cell.n_train] = full.y[i];
    }
    return data;
}

bool is_ensemble_method(Method m) {
    return m == Method::extra_nn || m == Method::boot_mean || m == Method::boot_percentile ||
           m == Method::boot_normal || m == Method::boot_bias_corrected;
}

}  // namespace

std::string dgp_name(DgpKind k) { return k == DgpKind::linear ? "linear" : "nonlinear"; }

std::optional<DgpKind> parse_dgp(std::string_view name) {
    if (name == "linear") return DgpKind::linear;
    if (name == "nonlinear") return DgpKind::nonlinear;
    return std::nullopt;
}

NetworkSpec simulation_spec(DgpKind kind) {
    NetworkSpec spec;
    spec.input_dim = 5;
    spec.hidden_widths = (kind == DgpKind::linear) ? std::vector<int>{5} : std::vector<int>{3, 2};
    return spec;
}

TrainConfig simulation_train_config(DgpKind kind, std::uint64_t seed) {
    TrainConfig config;
    config.shuffle = true;
    config.seed = seed;
    if (kind == DgpKind::linear) {
        config.learning_rate = 0.1;
        config.epochs = 10;
        config.batch_size = 32;
    } else {
        config.learning_rate = 0.01;
        config.epochs = 80;
        config.batch_size = 4;
    }
    return config;
}

FittedMethod fit_method(Method method, const NetworkSpec& spec, const Matrix& x_train,
                        std::span<const double> y_train, int T, double p,
                        const TrainConfig& config) {
    FittedMethod fit;
    fit.method = method;
    fit.spec = spec;
    fit.p = p;
    fit.T = T;

    switch (method) {
        case Method::extra_nn:
            fit.ensemble = extra_nn_fit(x_train, y_train, T, p, spec, config);
            break;
        case Method::boot_mean:
        case Method::boot_percentile:
            fit.ensemble = bootstrap_fit(x_train, y_train, T, spec, config);
            break;
        case Method::boot_normal:
        case Method::boot_bias_corrected: {
            fit.ensemble = bootstrap_fit(x_train, y_train, T, spec, config);
            TrainConfig base_config = config;
            base_config.seed = derive_seed(config.seed, kBaseNetSalt);
            fit.network = train_with_restarts(spec, x_train, y_train, base_config);
            fit.has_network = true;
            break;
        }
        case Method::mc_dropout:
            fit.network = train_with_restarts(spec, x_train, y_train, config,
                                              MaskMode::per_step_dropout, nullptr, p);
            fit.has_network = true;
            break;
        case Method::delta:
            fit.network = train_with_restarts(spec, x_train, y_train, config);
            fit.has_network = true;
            break;
    }
    return fit;
}

IntervalRun build_intervals(const FittedMethod& fit, const Matrix& x_test,
                            std::span<const double> y_test, std::span<const double> alphas,
                            std::uint64_t eval_seed, const Matrix* x_train,
                            std::span<const double> y_train) {
    if (alphas.empty()) throw std::invalid_argument("build_intervals: no significance levels");
    const std::size_t n = x_test.rows();
    if (n == 0 || y_test.size() != n)
        throw std::invalid_argument("build_intervals: test sample size mismatch");

    IntervalRun run;
    run.per_alpha.assign(alphas.size(), {});
    for (auto& series : run.per_alpha) series.resize(n);
    run.point_preds.resize(n);

    if (is_ensemble_method(fit.method)) {
        const std::size_t T = fit.ensemble.size();
        Matrix member_preds(T, n);
        std::vector<double> mean_preds(n);
        for (std::size_t i = 0; i < n; ++i) {
            const EnsemblePrediction ep = ensemble_predict(fit.ensemble, x_test.row_span(i));
            for (std::size_t t = 0; t < T; ++t) member_preds(t, i) = ep.member_preds[t];
            mean_preds[i] = ep.mean;
        }

        std::vector<double> base_preds;
        double base_sigma_e_sq = 0.0;
        if (fit.method == Method::boot_normal || fit.method == Method::boot_bias_corrected) {
            base_preds.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                base_preds[i] = predict(fit.spec, fit.network, x_test.row_span(i));
            base_sigma_e_sq = aleatoric_variance(base_preds, y_test);
        }
        const double mean_resid_var = aleatoric_variance(mean_preds, y_test);

        std::vector<double> members(T);
        for (std::size_t a = 0; a < alphas.size(); ++a) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t t = 0; t < T; ++t) members[t] = member_preds(t, i);
                switch (fit.method) {
                    case Method::extra_nn:
                        run.per_alpha[a][i] =
                            extra_nn_interval(members, y_test, mean_preds, alphas[a]);
                        break;
                    case Method::boot_mean:
                        run.per_alpha[a][i] =
                            boot_mean_interval(members, mean_resid_var, alphas[a]);
                        break;
                    case Method::boot_percentile:
                        run.per_alpha[a][i] = boot_percentile_interval(members, alphas[a]);
                        break;
                    case Method::boot_normal:
                        run.per_alpha[a][i] = boot_normal_interval(base_preds[i], members,
                                                                   base_sigma_e_sq, alphas[a]);
                        break;
                    case Method::boot_bias_corrected:
                        run.per_alpha[a][i] = boot_bias_corrected_interval(
                            base_preds[i], members, base_sigma_e_sq, alphas[a]);
                        break;
                    default:
                        break;
                }
            }
        }

        switch (fit.method) {
            case Method::boot_normal:
                run.point_preds = base_preds;
                break;
            case Method::boot_bias_corrected:
                for (std::size_t i = 0; i < n; ++i)
                    run.point_preds[i] = 2.0 * base_preds[i] - mean_preds[i];
                break;
            default:
                run.point_preds = mean_preds;
                break;
        }
        return run;
    }

    if (fit.method == Method::mc_dropout) {
        const std::size_t T = static_cast<std::size_t>(fit.T);
        if (T < 2) throw std::invalid_argument("build_intervals: mc_dropout needs T >= 2");
        Matrix samples(T, n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::vector<double> draws =
                mc_dropout_predict(fit.spec, fit.network, x_test.row_span(i),
                                   static_cast<int>(T), fit.p, derive_seed(eval_seed, i));
            for (std::size_t t = 0; t < T; ++t) samples(t, i) = draws[t];
            run.point_preds[i] = mean(draws);
        }
        const double sigma_e_sq = aleatoric_variance(run.point_preds, y_test);
        std::vector<double> draws(T);
        for (std::size_t a = 0; a < alphas.size(); ++a)
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t t = 0; t < T; ++t) draws[t] = samples(t, i);
                run.per_alpha[a][i] = mc_dropout_interval(draws, sigma_e_sq, alphas[a]);
            }
        return run;
    }

    // Delta method.
    if (x_train == nullptr || y_train.empty())
        throw std::invalid_argument("build_intervals: delta method requires the training sample");
    const DeltaEstimator estimator(fit.spec, fit.network, *x_train, y_train);
    for (std::size_t i = 0; i < n; ++i)
        run.point_preds[i] = predict(fit.spec, fit.network, x_test.row_span(i));
    for (std::size_t a = 0; a < alphas.size(); ++a)
        for (std::size_t i = 0; i < n; ++i)
            run.per_alpha[a][i] = estimator.interval(x_test.row_span(i), alphas[a]);
    return run;
}

void fold_target_scale(Parameters& params, double y_std, double y_mean) {
    if (!(y_std > 0.0)) throw std::invalid_argument("fold_target_scale: y_std must be positive");
    for (double& v : params.weights.back().data()) v *= y_std;
    for (double& v : params.biases.back()) v = v * y_std + y_mean;
}

void fold_target_scale(FittedMethod& fit, double y_std, double y_mean) {
    for (Parameters& member : fit.ensemble.members) fold_target_scale(member, y_std, y_mean);
    if (fit.has_network) fold_target_scale(fit.network, y_std, y_mean);
}

CoverageReport run_replication(const SimulationCell& cell, std::uint64_t replication_seed) {
    if (cell.T < 2) throw std::invalid_argument("run_replication: T must be at least 2");
    const ReplicationData data = prepare_data(cell, derive_seed(replication_seed, kDataSalt));
    const NetworkSpec spec = simulation_spec(cell.dgp);
    const std::uint64_t fit_seed = derive_seed(replication_seed, kFitSalt);
    const TrainConfig train_config = simulation_train_config(cell.dgp, fit_seed);

    const FittedMethod fit =
        fit_method(cell.method, spec, data.x_train, data.y_train, cell.T, cell.p, train_config);
    const IntervalRun run =
        build_intervals(fit, data.x_test, data.y_test, cell.alphas,
                        derive_seed(fit_seed, kMcEvalSalt), &data.x_train, data.y_train);
    return coverage_report(run.per_alpha, data.y_test, run.point_preds);
}

CoverageReport run_cell(const SimulationCell& cell, int replications, std::uint64_t seed) {
    if (replications < 1) throw std::invalid_argument("run_cell: replications must be positive");
    std::vector<CoverageReport> reports(static_cast<std::size_t>(replications));
    parallel_for(reports.size(), [&](std::size_t r) {
        reports[r] = run_replication(cell, derive_seed(derive_seed(seed, kRepSalt), r));
    });

    CoverageReport avg;
    avg.alphas = reports.front().alphas;
    avg.miss_rates.assign(avg.alphas.size(), 0.0);
    for (const CoverageReport& rep : reports) {
        for (std::size_t a = 0; a < avg.alphas.size(); ++a)
            avg.miss_rates[a] += rep.miss_rates[a];
        avg.mape += rep.mape;
        avg.mspe += rep.mspe;
        avg.n_test += rep.n_test;
    }
    const double inv = 1.0 / static_cast<double>(replications);
    for (double& m : avg.miss_rates) m *= inv;
    avg.mape *= inv;
    avg.mspe *= inv;
    avg.rmspe = std::sqrt(avg.mspe);
    return avg;
}

}  // namespace iforge

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iforge/dgp.hpp"
#include "iforge/intervals.hpp"

namespace iforge {

enum class DgpKind { linear, nonlinear };

std::string dgp_name(DgpKind k);
std::optional<DgpKind> parse_dgp(std::string_view name);

// Architecture and optimizer settings of the simulation study: the nonlinear
// process uses the known 3+2 structure (lr 0.01, 80 epochs), the linear one
// a shallow 5-unit network (lr 0.1, 10 epochs). Targets stay raw, so the
// batch size sets the Adam step budget each learning rate needs: 32 for the
// linear process, 4 for the larger-scale nonlinear one.
NetworkSpec simulation_spec(DgpKind kind);
TrainConfig simulation_train_config(DgpKind kind, std::uint64_t seed);

// A trained predictor of any interval method. Ensemble methods carry the
// ensemble; mc_dropout and delta carry a single network; the bootstrap
// normal/bias variants carry both (ensemble plus original-sample network).
struct FittedMethod {
    Method method = Method::extra_nn;
    NetworkSpec spec;
    double p = 1.0;
    int T = 0;
    Ensemble ensemble;
    Parameters network;
    bool has_network = false;
};

FittedMethod fit_method(Method method, const NetworkSpec& spec, const Matrix& x_train,
                        std::span<const double> y_train, int T, double p,
                        const TrainConfig& config);

// Networks train against standardized targets; folding the inverse transform
// into the output layer makes every trained network predict on the raw scale
// exactly (scale * (W h + b) + offset is again an affine output layer).
void fold_target_scale(Parameters& params, double y_std, double y_mean);
void fold_target_scale(FittedMethod& fit, double y_std, double y_mean);

struct IntervalRun {
    std::vector<std::vector<PredictionInterval>> per_alpha;  // [alpha][test point]
    std::vector<double> point_preds;
};

// Intervals at every alpha for every test row. y_test feeds the test-sample
// aleatoric estimators. The delta method additionally needs the training
// sample to assemble its Jacobian.
IntervalRun build_intervals(const FittedMethod& fit, const Matrix& x_test,
                            std::span<const double> y_test, std::span<const double> alphas,
                            std::uint64_t eval_seed, const Matrix* x_train = nullptr,
                            std::span<const double> y_train = {});

struct SimulationCell {
    DgpKind dgp = DgpKind::linear;
    Method method = Method::extra_nn;
    int T = 30;
    double p = 0.995;
    std::vector<double> alphas{0.01, 0.05, 0.10};
    std::size_t n_train = 1200;
    std::size_t n_test = 300;
};

// One replication: generate, split, standardize regressors on the training
// fold, fit the method, build intervals at every alpha, score coverage.
CoverageReport run_replication(const SimulationCell& cell, std::uint64_t replication_seed);

// Averages miss rates and errors over independent replications.
CoverageReport run_cell(const SimulationCell& cell, int replications, std::uint64_t seed);

}  // namespace iforge

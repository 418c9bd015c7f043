// Acceptance suite. Each criterion runs standalone:
//
//   acceptance <id>      one criterion (01..10)
//   acceptance           all criteria in order
//
// One [PASS]/[FAIL] line per criterion; exit 0 iff everything passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "iforge/bench.hpp"
#include "iforge/cli.hpp"
#include "iforge/dgp.hpp"
#include "iforge/experiment.hpp"
#include "iforge/intervals.hpp"
#include "iforge/io.hpp"
#include "iforge/mask.hpp"
#include "iforge/network.hpp"
#include "iforge/rng.hpp"
#include "iforge/stats.hpp"

using namespace iforge;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << id << " (" << name << "): "
              << detail << "\n";
    if (!ok) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

NetworkSpec make_spec(int d, std::vector<int> hidden) {
    NetworkSpec spec;
    spec.input_dim = d;
    spec.hidden_widths = std::move(hidden);
    return spec;
}

// ---------------------------------------------------------------- criterion 1

double batch_loss(const NetworkSpec& spec, const Parameters& params, const Matrix& X,
                  std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double r = forward(spec, params, X.row_span(i)).prediction - y[i];
        acc += r * r;
    }
    return acc / static_cast<double>(X.rows());
}

void criterion_01_gradient_oracle() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    const double h = 1e-5;

    for (std::uint64_t net = 0; net < 100; ++net) {
        // Draw a network/batch pair whose pre-activations keep clear of the
        // ReLU kinks so central differences are trustworthy.
        NetworkSpec spec;
        Parameters params;
        Matrix X;
        std::vector<double> y;
        for (std::uint64_t attempt = 0;; ++attempt) {
            Rng rng(derive_seed(9000 + net, attempt));
            const int d = 1 + static_cast<int>(rng.uniform_index(5));
            const int layers = 1 + static_cast<int>(rng.uniform_index(2));
            std::vector<int> widths;
            for (int l = 0; l < layers; ++l)
                widths.push_back(1 + static_cast<int>(rng.uniform_index(6)));
            spec = make_spec(d, widths);
            params = init_network(spec, rng.next_u64());
            const std::size_t batch = 1 + rng.uniform_index(4);
            X = Matrix(batch, static_cast<std::size_t>(d));
            y.assign(batch, 0.0);
            for (std::size_t i = 0; i < batch; ++i) {
                for (std::size_t j = 0; j < static_cast<std::size_t>(d); ++j)
                    X(i, j) = rng.normal();
                y[i] = rng.normal();
            }
            double gap = 1e300;
            for (std::size_t i = 0; i < X.rows(); ++i) {
                const ForwardTrace trace = forward(spec, params, X.row_span(i));
                for (const auto& layer : trace.pre)
                    for (double v : layer) gap = std::min(gap, std::abs(v));
            }
            if (gap > 1e-3) break;
        }

        const Parameters analytic = backward(spec, params, X, y);
        Parameters probe = params;
        auto check_slot = [&](double& slot, double reference) {
            const double saved = slot;
            slot = saved + h;
            const double up = batch_loss(spec, probe, X, y);
            slot = saved - h;
            const double down = batch_loss(spec, probe, X, y);
            slot = saved;
            const double fd = (up - down) / (2.0 * h);
            const double denom = std::max({std::abs(fd), std::abs(reference), 1e-4});
            worst = std::max(worst, std::abs(fd - reference) / denom);
        };
        for (std::size_t l = 0; l < probe.weights.size(); ++l) {
            for (std::size_t i = 0; i < probe.weights[l].data().size(); ++i)
                check_slot(probe.weights[l].data()[i], analytic.weights[l].data()[i]);
            for (std::size_t i = 0; i < probe.biases[l].size(); ++i)
                check_slot(probe.biases[l][i], analytic.biases[l][i]);
        }
    }

    const double secs = elapsed_s(start);
    std::ostringstream detail;
    detail << "100 networks, max relative error " << worst << " (< 1e-5), " << secs
           << " s (< 10 s)";
    report(1, "gradient oracle", worst < 1e-5 && secs < 10.0, detail.str());
}

// ---------------------------------------------------------------- criterion 2

void criterion_02_cholesky_coloring() {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = 100000;
    Rng rng(1001);
    Matrix raw(n, 5);
    const double means[5] = {-4.0, 2.0, 2.0, 2.0, 4.0};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < 5; ++j) raw(i, j) = rng.normal(means[j], 1.0);

    const CorrelationTarget target = CorrelationTarget::simulation_default();
    const Matrix out = impose_correlation(raw, target);

    const ColumnStats stats = column_stats(out);
    Matrix v = out;
    standardize_columns(v, stats);
    double worst = 0.0;
    for (std::size_t a = 0; a < 5; ++a) {
        for (std::size_t b = a + 1; b < 5; ++b) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += v(i, a) * v(i, b);
            acc /= static_cast<double>(n);
            worst = std::max(worst, std::abs(acc - target.C(a, b)));
        }
    }

    const double secs = elapsed_s(start);
    std::ostringstream detail;
    detail << "n=100000, max |empirical - target| = " << worst << " (< 0.02), " << secs
           << " s (< 30 s)";
    report(2, "Cholesky coloring", worst < 0.02 && secs < 30.0, detail.str());
}

// ---------------------------------------------------------------- criterion 3

void criterion_03_extra_nn_coverage() {
    SimulationCell cell;
    cell.dgp = DgpKind::linear;
    cell.method = Method::extra_nn;
    cell.T = 30;
    cell.p = 0.995;
    const CoverageReport report_avg = run_cell(cell, 20, 20250301);

    bool ok = true;
    std::ostringstream detail;
    detail << "20 replications, miss rates:";
    const double nominal[3] = {0.01, 0.05, 0.10};
    for (std::size_t a = 0; a < 3; ++a) {
        detail << " alpha=" << nominal[a] << " -> " << report_avg.miss_rates[a];
        if (std::abs(report_avg.miss_rates[a] - nominal[a]) > 0.03) ok = false;
    }
    detail << " (each within +/- 0.03); MAPE " << report_avg.mape << ", MSPE " << report_avg.mspe;
    report(3, "extra-NN linear coverage, T=30 p=0.995", ok, detail.str());
}

// ---------------------------------------------------------------- criterion 4

void criterion_04_dropout_rate_sensitivity() {
    SimulationCell mc;
    mc.dgp = DgpKind::linear;
    mc.method = Method::mc_dropout;
    mc.T = 30;
    mc.p = 0.80;
    const CoverageReport mc_report = run_cell(mc, 20, 20250401);

    SimulationCell extra = mc;
    extra.method = Method::extra_nn;
    const CoverageReport extra_report = run_cell(extra, 20, 20250401);

    const double mc_miss_95 = mc_report.miss_rates[1];
    const double extra_miss_95 = extra_report.miss_rates[1];
    const bool ok = mc_miss_95 <= 0.01 && std::abs(extra_miss_95 - 0.05) <= 0.03;
    std::ostringstream detail;
    detail << "p=0.80, alpha=0.05: mc_dropout miss " << mc_miss_95
           << " (<= 0.01, severe over-coverage), extra_nn miss " << extra_miss_95
           << " (within 0.05 +/- 0.03)";
    report(4, "dropout-rate sensitivity ordering", ok, detail.str());
}

// ---------------------------------------------------------------- criterion 5

void criterion_05_mspe_ordering() {
    SimulationCell extra;
    extra.dgp = DgpKind::nonlinear;
    extra.method = Method::extra_nn;
    extra.T = 30;
    extra.p = 0.995;
    const CoverageReport extra_report = run_cell(extra, 10, 20250501);

    SimulationCell mc = extra;
    mc.method = Method::mc_dropout;
    const CoverageReport mc_report = run_cell(mc, 10, 20250501);

    const bool ok = mc_report.mspe >= 2.0 * extra_report.mspe;
    std::ostringstream detail;
    detail << "nonlinear, T=30: extra_nn MSPE " << extra_report.mspe << ", mc_dropout MSPE "
           << mc_report.mspe << " (ratio " << mc_report.mspe / extra_report.mspe << ", >= 2)";
    report(5, "MSPE ordering extra-NN vs MC dropout", ok, detail.str());
}

// ---------------------------------------------------------------- criterion 6

void criterion_06_bootstrap_unique_fraction() {
    const std::size_t M = 1200;
    double total = 0.0;
    for (int t = 0; t < 50; ++t) {
        const auto idx = bootstrap_resample_indices(M, ensemble_member_seed(606, t));
        const std::set<std::size_t> unique(idx.begin(), idx.end());
        total += static_cast<double>(unique.size()) / static_cast<double>(M);
    }
    const double mean_fraction = total / 50.0;
    std::ostringstream detail;
    detail << "mean unique fraction over 50 members at M=1200: " << mean_fraction
           << " (0.6323 +/- 0.01)";
    report(6, "bootstrap unique-row fraction", std::abs(mean_fraction - 0.6323) < 0.01,
           detail.str());
}

// ---------------------------------------------------------------- criterion 7

bool property_interval_nesting() {
    Rng rng(7001);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<double> members(12);
        for (auto& v : members) v = rng.normal(0.5, 2.0);
        std::vector<double> targets(6);
        std::vector<double> preds(6);
        for (auto& v : targets) v = rng.normal();
        for (auto& v : preds) v = rng.normal();
        const double s2 = rng.uniform(0.0, 1.5);
        const double point = rng.normal();
        const double alphas[3] = {0.01, 0.05, 0.10};
        for (int a = 1; a < 3; ++a) {
            auto nested = [](const PredictionInterval& wide, const PredictionInterval& narrow) {
                return wide.lower <= narrow.lower && wide.upper >= narrow.upper;
            };
            if (!nested(boot_percentile_interval(members, alphas[a - 1]),
                        boot_percentile_interval(members, alphas[a])))
                return false;
            if (!nested(boot_normal_interval(point, members, s2, alphas[a - 1]),
                        boot_normal_interval(point, members, s2, alphas[a])))
                return false;
            if (!nested(boot_bias_corrected_interval(point, members, s2, alphas[a - 1]),
                        boot_bias_corrected_interval(point, members, s2, alphas[a])))
                return false;
            if (!nested(boot_mean_interval(members, s2, alphas[a - 1]),
                        boot_mean_interval(members, s2, alphas[a])))
                return false;
            if (!nested(mc_dropout_interval(members, s2, alphas[a - 1]),
                        mc_dropout_interval(members, s2, alphas[a])))
                return false;
            if (!nested(extra_nn_interval(members, targets, preds, alphas[a - 1]),
                        extra_nn_interval(members, targets, preds, alphas[a])))
                return false;
        }
    }
    return true;
}

bool property_mc_epistemic_collapse_at_p1() {
    const NetworkSpec spec = make_spec(3, {5});
    Matrix X(48, 3);
    std::vector<double> y(48);
    Rng rng(7002);
    for (auto& v : X.data()) v = rng.normal();
    for (std::size_t i = 0; i < 48; ++i) y[i] = 1.0 + X(i, 0) - X(i, 2) + 0.1 * rng.normal();
    TrainConfig config;
    config.epochs = 5;
    config.batch_size = 16;
    config.learning_rate = 0.05;
    config.seed = 70021;
    const Parameters net = train(spec, X, y, config, MaskMode::per_step_dropout, nullptr, 1.0);

    for (int i = 0; i < 10; ++i) {
        std::vector<double> x(3);
        for (auto& v : x) v = rng.normal();
        const std::vector<double> samples = mc_dropout_predict(spec, net, x, 40, 1.0, 7100 + i);
        if (population_variance(samples) != 0.0) return false;
        const PredictionInterval pi = mc_dropout_interval(samples, 0.3, 0.05);
        if (pi.epistemic_var != 0.0) return false;
    }
    return true;
}

bool property_percentile_brute_force() {
    Rng rng(7003);
    for (std::size_t T = 2; T <= 12; ++T) {
        for (int rep = 0; rep < 40; ++rep) {
            std::vector<double> members(T);
            for (auto& v : members) v = rng.normal(0.0, 4.0);
            for (double alpha : {0.01, 0.05, 0.10, 0.25}) {
                const PredictionInterval pi = boot_percentile_interval(members, alpha);
                std::vector<double> sorted = members;
                std::sort(sorted.begin(), sorted.end());
                auto oracle = [&](double q) {
                    const double pos = (static_cast<double>(T) - 1.0) * q;
                    const auto lo = static_cast<std::size_t>(pos);
                    if (lo + 1 >= T) return sorted.back();
                    return sorted[lo] +
                           (pos - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
                };
                if (std::abs(pi.lower - oracle(alpha / 2.0)) > 1e-12) return false;
                if (std::abs(pi.upper - oracle(1.0 - alpha / 2.0)) > 1e-12) return false;
            }
        }
    }
    return true;
}

bool property_shared_kernel() {
    Rng rng(7004);
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<double> members(20);
        for (auto& v : members) v = rng.normal(1.0, 3.0);
        // targets/preds with a known residual variance.
        std::vector<double> targets(10);
        std::vector<double> preds(10);
        for (std::size_t i = 0; i < 10; ++i) {
            preds[i] = rng.normal();
            targets[i] = preds[i] + rng.normal(0.0, 0.8);
        }
        const double sigma_sq = aleatoric_variance(preds, targets);
        for (double alpha : {0.01, 0.05, 0.10}) {
            const PredictionInterval a = boot_mean_interval(members, sigma_sq, alpha);
            const PredictionInterval b = extra_nn_interval(members, targets, preds, alpha);
            if (a.lower != b.lower || a.upper != b.upper || a.center != b.center) return false;
            if (a.epistemic_var != b.epistemic_var || a.aleatoric_var != b.aleatoric_var)
                return false;
        }
    }
    return true;
}

bool property_masked_equals_reduced() {
    for (std::uint64_t seed = 7200; seed < 7212; ++seed) {
        Rng rng(seed);
        const NetworkSpec spec = make_spec(1 + static_cast<int>(rng.uniform_index(4)),
                                           {2 + static_cast<int>(rng.uniform_index(2)),
                                            2 + static_cast<int>(rng.uniform_index(2))});
        const Parameters params = init_network(spec, rng.next_u64());
        const Mask mask = sample_mask(spec, 0.6, rng.next_u64(), MaskKind::fixed_structural);

        NetworkSpec reduced = spec;
        std::vector<std::vector<std::size_t>> kept(mask.keep.size());
        for (std::size_t l = 0; l < mask.keep.size(); ++l) {
            for (std::size_t j = 0; j < mask.keep[l].size(); ++j)
                if (mask.keep[l][j]) kept[l].push_back(j);
            reduced.hidden_widths[l] = static_cast<int>(kept[l].size());
        }
        Parameters small = Parameters::zeros(reduced);
        for (std::size_t l = 0; l < params.weights.size(); ++l) {
            for (std::size_t i = 0; i < small.weights[l].rows(); ++i) {
                const std::size_t src_i = (l < kept.size()) ? kept[l][i] : i;
                for (std::size_t j = 0; j < small.weights[l].cols(); ++j) {
                    const std::size_t src_j = (l > 0) ? kept[l - 1][j] : j;
                    small.weights[l](i, j) = params.weights[l](src_i, src_j);
                }
                small.biases[l][i] = params.biases[l][src_i];
            }
        }

        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> x(spec.input_dim);
            for (auto& v : x) v = rng.normal();
            if (forward(spec, params, x, &mask).prediction != predict(reduced, small, x))
                return false;
        }
    }
    return true;
}

void criterion_07_property_suite() {
    struct Property {
        const char* name;
        bool ok;
    };
    const Property properties[] = {
        {"interval nesting", property_interval_nesting()},
        {"p=1 epistemic collapse", property_mc_epistemic_collapse_at_p1()},
        {"percentile brute force T<=12", property_percentile_brute_force()},
        {"boot_mean/extra_nn shared kernel", property_shared_kernel()},
        {"masked == reduced sub-network", property_masked_equals_reduced()},
    };
    bool all = true;
    std::ostringstream detail;
    for (const auto& p : properties) {
        detail << p.name << "=" << (p.ok ? "ok" : "FAIL") << "; ";
        all = all && p.ok;
    }
    report(7, "property suite", all, detail.str());
}

// ---------------------------------------------------------------- criterion 8

void criterion_08_delta_leverage() {
    // One-hidden-unit network fit to linear data; hunt for a seed whose
    // trained unit is active across the sample so the linearization spans
    // exactly {x, 1}.
    const NetworkSpec spec = make_spec(1, {1});
    const std::size_t M = 60;
    Matrix X(M, 1);
    std::vector<double> y(M);
    Rng rng(8001);
    for (std::size_t i = 0; i < M; ++i) {
        X(i, 0) = rng.uniform(1.0, 2.0);
        y[i] = 2.0 * X(i, 0) + 1.0 + rng.normal(0.0, 0.05);
    }

    Parameters net;
    bool found = false;
    for (std::uint64_t seed = 1; seed <= 50 && !found; ++seed) {
        TrainConfig config;
        config.epochs = 300;
        config.batch_size = 16;
        config.learning_rate = 0.02;
        config.seed = seed;
        const Parameters candidate = train(spec, X, y, config);
        double min_pre = 1e300;
        for (std::size_t i = 0; i < M; ++i) {
            const ForwardTrace trace = forward(spec, candidate, X.row_span(i));
            min_pre = std::min(min_pre, trace.pre[0][0]);
        }
        double mse = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            const double r = predict(spec, candidate, X.row_span(i)) - y[i];
            mse += r * r;
        }
        mse /= static_cast<double>(M);
        if (min_pre > 0.05 && mse < 0.05) {
            net = candidate;
            found = true;
        }
    }
    if (!found) {
        report(8, "delta leverage oracle", false, "no trained network stayed in its linear region");
        return;
    }

    const DeltaEstimator estimator(spec, net, X, y);
    double sx = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        sx += X(i, 0);
        sxx += X(i, 0) * X(i, 0);
    }
    const double det = sxx * static_cast<double>(M) - sx * sx;

    double worst = 0.0;
    for (double x : {1.05, 1.25, 1.5, 1.75, 1.95}) {
        const std::vector<double> grad = jacobian(spec, net, std::vector<double>{x});
        const double s = estimator.leverage(grad);
        const double leverage = (x * x * static_cast<double>(M) - 2.0 * x * sx + sxx) / det;
        worst = std::max(worst, std::abs((1.0 + s) - (1.0 + leverage)) / (1.0 + leverage));
    }
    std::ostringstream detail;
    detail << "max relative error of 1+S vs closed-form leverage: " << worst << " (< 1e-6)";
    report(8, "delta leverage oracle", worst < 1e-6, detail.str());
}

// ---------------------------------------------------------------- criterion 9

struct Table2Case {
    const char* file;
    std::size_t rows;
    std::size_t features;
    double rmspe_bound;
    double reference_value;
};

// data/uci may sit relative to wherever the suite runs from; IFORGE_DATA_DIR
// overrides the search.
fs::path locate_data_dir() {
    if (const char* env = std::getenv("IFORGE_DATA_DIR")) return fs::path(env);
    fs::path probe = fs::path("data") / "uci";
    for (int up = 0; up < 4; ++up) {
        if (fs::exists(probe)) return probe;
        probe = ".." / probe;
    }
    return fs::path("data") / "uci";
}

void criterion_09_table2_benchmarks() {
    const fs::path data_dir = locate_data_dir();
    const Table2Case cases[] = {
        {"yacht.csv", 308, 6, 1.5, 0.72},
        {"energy.csv", 768, 8, 1.2, 0.59},
        {"boston.csv", 506, 13, 4.0, 2.80},
    };

    bool all_ok = true;
    std::ostringstream detail;
    for (const auto& c : cases) {
        const fs::path path = data_dir / c.file;
        if (!fs::exists(path)) {
            all_ok = false;
            detail << c.file << ": MISSING (dataset acquisition is out of band; place a numeric "
                   << "CSV with header and a 'target' column at " << path.string() << ", "
                   << c.rows << " rows x " << c.features << " features); ";
            continue;
        }
        try {
            const Dataset data = load_csv(path.string(), "target");
            if (data.n() != c.rows || data.dim() != c.features) {
                all_ok = false;
                detail << c.file << ": unexpected shape " << data.n() << "x" << data.dim()
                       << " (want " << c.rows << "x" << c.features << "); ";
                continue;
            }
            BenchmarkConfig config;
            config.method = BenchMethod::extra_nn;
            config.ensemble_size = 70;
            config.n_splits = 20;
            config.seed = 90210;
            const BenchmarkResult result = run_benchmark(config, data);
            const bool ok = result.mean_rmspe <= c.rmspe_bound;
            all_ok = all_ok && ok;
            detail << c.file << ": mean RMSPE " << result.mean_rmspe << " (<= " << c.rmspe_bound
                   << ", reference " << c.reference_value << ")" << (ok ? "" : " EXCEEDED") << "; ";
        } catch (const std::exception& e) {
            all_ok = false;
            detail << c.file << ": " << e.what() << "; ";
        }
    }
    report(9, "benchmark spot checks", all_ok, detail.str());
}

// --------------------------------------------------------------- criterion 10

std::string normalized_json(const fs::path& path) {
    nlohmann::json j = nlohmann::json::parse(std::ifstream(path));
    j.erase("runtime_s");
    return j.dump();
}

fs::path only_subdir(const fs::path& root) {
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) return entry.path();
    throw std::runtime_error("no run directory under " + root.string());
}

void criterion_10_reproducibility() {
    const fs::path base = fs::temp_directory_path() / "iforge_acceptance_repro";
    fs::remove_all(base);
    fs::create_directories(base);

    bool ok = true;
    std::ostringstream detail;

    // simulate twice from identical configuration.
    const std::vector<std::string> sim_common{
        "simulate", "--dgp",  "linear", "--method",       "extra_nn", "--T",    "3",
        "--p",      "0.9",    "--replications", "2",      "--n-train", "150",
        "--n-test", "50",     "--seed", "77"};
    for (int run = 0; run < 2; ++run) {
        auto args = sim_common;
        args.push_back("--out");
        args.push_back((base / ("sim" + std::to_string(run))).string());
        if (run_cli(args) != 0) {
            report(10, "reproducibility", false, "simulate run failed");
            return;
        }
    }
    const fs::path sim0 = only_subdir(base / "sim0");
    const fs::path sim1 = only_subdir(base / "sim1");
    if (read_text_file((sim0 / "results.csv").string()) !=
        read_text_file((sim1 / "results.csv").string())) {
        ok = false;
        detail << "simulate results.csv differ; ";
    }
    if (read_text_file((sim0 / "summary.json").string()) !=
        read_text_file((sim1 / "summary.json").string())) {
        ok = false;
        detail << "simulate summary.json differ; ";
    }

    // rerun from the stored manifest.
    if (run_cli({"rerun", (sim0 / "manifest.json").string(), "--out",
                 (base / "sim_rerun").string()}) != 0) {
        report(10, "reproducibility", false, "rerun from manifest failed");
        return;
    }
    const fs::path sim2 = only_subdir(base / "sim_rerun");
    if (read_text_file((sim0 / "results.csv").string()) !=
        read_text_file((sim2 / "results.csv").string())) {
        ok = false;
        detail << "rerun results.csv differ; ";
    }

    // benchmark twice on a synthetic CSV.
    const fs::path csv = base / "toy.csv";
    {
        std::ofstream out(csv);
        out << "a,b,y\n";
        out.precision(17);
        Rng rng(404);
        for (int i = 0; i < 120; ++i) {
            const double a = rng.normal();
            const double b = rng.normal();
            out << a << "," << b << "," << (2.0 * a - b + 0.2 * rng.normal()) << "\n";
        }
    }
    for (int run = 0; run < 2; ++run) {
        if (run_cli({"benchmark", "--data", csv.string(), "--target", "y", "--method", "single",
                     "--splits", "3", "--epochs", "5", "--seed", "13", "--out",
                     (base / ("bench" + std::to_string(run))).string()}) != 0) {
            report(10, "reproducibility", false, "benchmark run failed");
            return;
        }
    }
    const fs::path bench0 = only_subdir(base / "bench0");
    const fs::path bench1 = only_subdir(base / "bench1");
    if (read_text_file((bench0 / "per_split.csv").string()) !=
        read_text_file((bench1 / "per_split.csv").string())) {
        ok = false;
        detail << "benchmark per_split.csv differ; ";
    }
    if (normalized_json(bench0 / "result.json") != normalized_json(bench1 / "result.json")) {
        ok = false;
        detail << "benchmark result.json differ beyond runtime_s; ";
    }

    if (ok) detail << "simulate, rerun-from-manifest and benchmark artifacts byte-identical";
    report(10, "reproducibility", ok, detail.str());
}

}  // namespace

int main(int argc, char** argv) {
    const std::string which = (argc > 1) ? argv[1] : "";
    auto want = [&](const char* id) { return which.empty() || which == id; };

    if (want("01")) criterion_01_gradient_oracle();
    if (want("02")) criterion_02_cholesky_coloring();
    if (want("03")) criterion_03_extra_nn_coverage();
    if (want("04")) criterion_04_dropout_rate_sensitivity();
    if (want("05")) criterion_05_mspe_ordering();
    if (want("06")) criterion_06_bootstrap_unique_fraction();
    if (want("07")) criterion_07_property_suite();
    if (want("08")) criterion_08_delta_leverage();
    if (want("09")) criterion_09_table2_benchmarks();
    if (want("10")) criterion_10_reproducibility();

    return g_failures == 0 ? 0 : 1;
}

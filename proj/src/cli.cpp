#include "iforge/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "iforge/bench.hpp"
#include "iforge/experiment.hpp"
#include "iforge/io.hpp"
#include "iforge/rng.hpp"
#include "iforge/svg.hpp"

namespace iforge {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kPredictEvalSalt = 0x70726576ULL;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string config_hash(const json& config) { return hex16(fnv1a64(config.dump())); }

fs::path make_run_dir(const std::string& out_root, const std::string& hash) {
    const fs::path dir = fs::path(out_root) / hash;
    fs::create_directories(dir);
    return dir;
}

void write_manifest(const fs::path& dir, const json& config, const std::string& hash,
                    const std::string& started, const std::vector<std::string>& outputs,
                    double runtime_s) {
    json manifest;
    manifest["command"] = config.at("command");
    manifest["config"] = config;
    manifest["manifest_hash"] = hash;
    manifest["tool_version"] = std::string(kToolVersion);
    manifest["started_at"] = started;
    manifest["finished_at"] = iso8601_now();
    manifest["runtime_s"] = runtime_s;
    manifest["outputs"] = outputs;
    write_text_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");
}

std::string coverage_column(double alpha) {
    std::ostringstream ss;
    ss << "Cov" << 100.0 * (1.0 - alpha);
    return ss.str();
}

// ------------------------------------------------------------------ simulate

struct SimulateArgs {
    std::string dgp = "linear";
    std::vector<std::string> methods{"extra_nn"};
    std::vector<int> T_values{30};
    std::vector<double> p_values{0.995};
    std::vector<double> alphas{0.01, 0.05, 0.10};
    std::size_t n_train = 1200;
    std::size_t n_test = 300;
    int replications = 20;
    std::uint64_t seed = 1;
    std::string out_root = "runs";
};

json simulate_config_json(const SimulateArgs& a) {
    json config;
    config["command"] = "simulate";
    config["dgp"] = a.dgp;
    config["methods"] = a.methods;
    config["T"] = a.T_values;
    config["p"] = a.p_values;
    config["alpha"] = a.alphas;
    config["n_train"] = a.n_train;
    config["n_test"] = a.n_test;
    config["replications"] = a.replications;
    config["seed"] = a.seed;
    return config;
}

int cmd_simulate(const SimulateArgs& args) {
    const auto dgp = parse_dgp(args.dgp);
    if (!dgp) throw UsageError("unknown dgp '" + args.dgp + "'");
    std::vector<Method> methods;
    for (const std::string& name : args.methods) {
        const auto m = parse_method(name);
        if (!m) throw UsageError("unknown method '" + name + "'");
        methods.push_back(*m);
    }
    if (methods.empty() || args.T_values.empty() || args.p_values.empty() || args.alphas.empty())
        throw UsageError("simulate: methods, T, p and alpha lists must be nonempty");
    for (int T : args.T_values)
        if (T < 2) throw UsageError("simulate: T must be at least 2");
    for (double p : args.p_values)
        if (!(p > 0.0 && p <= 1.0)) throw UsageError("simulate: p must be in (0, 1]");
    for (double a : args.alphas)
        if (!(a > 0.0 && a < 1.0)) throw UsageError("simulate: alpha must be in (0, 1)");

    const std::string started = iso8601_now();
    const auto t0 = std::chrono::steady_clock::now();
    const json config = simulate_config_json(args);
    const std::string hash = config_hash(config);
    const fs::path dir = make_run_dir(args.out_root, hash);

    std::ostringstream csv;
    csv << "# manifest " << hash << "\n";
    csv << "method,T,p,MAPE,MSPE";
    for (double a : args.alphas) csv << "," << coverage_column(a);
    csv << "\n";

    json rows = json::array();
    for (Method method : methods) {
        for (int T : args.T_values) {
            for (double p : args.p_values) {
                SimulationCell cell;
                cell.dgp = *dgp;
                cell.method = method;
                cell.T = T;
                cell.p = p;
                cell.alphas = args.alphas;
                cell.n_train = args.n_train;
                cell.n_test = args.n_test;
                const CoverageReport report = run_cell(cell, args.replications, args.seed);

                csv << method_name(method) << "," << T << "," << format_double(p) << ","
                    << format_double(report.mape) << "," << format_double(report.mspe);
                for (double miss : report.miss_rates) csv << "," << format_double(miss);
                csv << "\n";

                json row;
                row["method"] = method_name(method);
                row["T"] = T;
                row["p"] = p;
                row["MAPE"] = report.mape;
                row["MSPE"] = report.mspe;
                row["RMSPE"] = report.rmspe;
                row["n_test"] = report.n_test;
                json miss = json::object();
                for (std::size_t a = 0; a < report.alphas.size(); ++a)
                    miss[coverage_column(report.alphas[a])] = report.miss_rates[a];
                row["miss_rates"] = miss;
                rows.push_back(row);

                std::cout << method_name(method) << " T=" << T << " p=" << p
                          << "  MAPE=" << report.mape << "  MSPE=" << report.mspe << "  miss=(";
                for (std::size_t a = 0; a < report.miss_rates.size(); ++a)
                    std::cout << (a ? ", " : "") << report.miss_rates[a];
                std::cout << ")\n";
            }
        }
    }

    write_text_file((dir / "results.csv").string(), csv.str());
    json summary;
    summary["manifest_hash"] = hash;
    summary["config"] = config;
    summary["rows"] = rows;
    write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");
    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir, config, hash, started, {"results.csv", "summary.json"}, runtime);
    std::cout << "run directory: " << dir.string() << "\n";
    return 0;
}

// ----------------------------------------------------------------- benchmark

struct BenchmarkArgs {
    std::string data_path;
    std::string target_column;
    std::string method = "extra_nn";
    int T = 5;
    int splits = -1;  // -1: tier default
    double p = 0.95;
    int epochs = 40;
    double learning_rate = 0.01;
    std::uint64_t seed = 1;
    std::string out_root = "runs";
    bool allow_huge = false;
};

json benchmark_config_json(const BenchmarkArgs& a) {
    json config;
    config["command"] = "benchmark";
    config["data"] = a.data_path;
    config["target"] = a.target_column;
    config["method"] = a.method;
    config["T"] = a.T;
    config["splits"] = a.splits;
    config["p"] = a.p;
    config["epochs"] = a.epochs;
    config["learning_rate"] = a.learning_rate;
    config["seed"] = a.seed;
    config["allow_huge"] = a.allow_huge;
    return config;
}

int cmd_benchmark(const BenchmarkArgs& args) {
    const auto method = parse_bench_method(args.method);
    if (!method)
        throw UsageError("unknown benchmark method '" + args.method +
                         "' (expected extra_nn, mc_dropout or single)");
    if (args.T < 1) throw UsageError("benchmark: T must be positive");

    Dataset data;
    try {
        data = load_csv(args.data_path, args.target_column);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }

    BenchmarkConfig config;
    config.data_path = args.data_path;
    config.target_column = args.target_column;
    config.method = *method;
    config.ensemble_size = args.T;
    config.retain_prob = args.p;
    config.epochs = args.epochs;
    config.learning_rate = args.learning_rate;
    config.seed = args.seed;
    config.allow_huge = args.allow_huge;
    config.apply_tier_defaults(data.n(), /*splits_overridden=*/args.splits > 0);
    if (args.splits > 0) config.n_splits = args.splits;

    if (data.n() >= BenchmarkConfig::kHugeRows && !args.allow_huge)
        throw UsageError("dataset has " + std::to_string(data.n()) +
                         " rows (huge tier); re-run with --allow-huge to proceed");

    const std::string started = iso8601_now();
    const json config_json = benchmark_config_json(args);
    const std::string hash = config_hash(config_json);
    const fs::path dir = make_run_dir(args.out_root, hash);

    const BenchmarkResult result = run_benchmark(config, data);

    json out;
    out["dataset"] = fs::path(args.data_path).filename().string();
    out["method"] = bench_method_name(*method);
    out["T"] = args.T;
    out["n_splits"] = config.n_splits;
    out["mean_rmspe"] = result.mean_rmspe;
    if (result.se)
        out["se"] = *result.se;
    else
        out["se"] = nullptr;
    out["per_split"] = result.per_split_rmspe;
    out["runtime_s"] = result.runtime_s;
    out["manifest_hash"] = hash;
    write_text_file((dir / "result.json").string(), out.dump(2) + "\n");

    std::ostringstream csv;
    csv << "# manifest " << hash << "\n";
    csv << "split,rmspe\n";
    for (std::size_t s = 0; s < result.per_split_rmspe.size(); ++s)
        csv << s << "," << format_double(result.per_split_rmspe[s]) << "\n";
    write_text_file((dir / "per_split.csv").string(), csv.str());

    write_manifest(dir, config_json, hash, started, {"result.json", "per_split.csv"},
                   result.runtime_s);

    std::cout << out["dataset"].get<std::string>() << " " << bench_method_name(*method)
              << " T=" << args.T << ": mean RMSPE " << result.mean_rmspe;
    if (result.se) std::cout << " +/- " << *result.se;
    std::cout << " over " << config.n_splits << " splits\n";
    std::cout << "run directory: " << dir.string() << "\n";
    return 0;
}

// ------------------------------------------------------------------- predict

struct PredictArgs {
    std::string data_path;
    std::string test_path;
    std::string target_column;
    std::string method = "extra_nn";
    int T = 30;
    double p = 0.95;
    std::vector<double> alphas{0.01, 0.05, 0.10};
    std::vector<int> hidden{50};
    int epochs = 40;
    int batch_size = 32;
    double learning_rate = 0.01;
    std::uint64_t seed = 1;
    std::string out_root = "runs";
    bool plot = false;
    std::string ensemble_path;
    bool save_ensemble = false;
};

json predict_config_json(const PredictArgs& a) {
    json config;
    config["command"] = "predict";
    config["data"] = a.data_path;
    config["test"] = a.test_path;
    config["target"] = a.target_column;
    config["method"] = a.method;
    config["T"] = a.T;
    config["p"] = a.p;
    config["alpha"] = a.alphas;
    config["hidden"] = a.hidden;
    config["epochs"] = a.epochs;
    config["batch_size"] = a.batch_size;
    config["learning_rate"] = a.learning_rate;
    config["seed"] = a.seed;
    config["plot"] = a.plot;
    config["ensemble"] = a.ensemble_path;
    config["save_ensemble"] = a.save_ensemble;
    return config;
}

json parameters_to_json(const Parameters& params) {
    json j;
    j["weights"] = json::array();
    j["biases"] = json::array();
    for (const auto& w : params.weights) j["weights"].push_back(w.data());
    for (const auto& b : params.biases) j["biases"].push_back(b);
    return j;
}

Parameters parameters_from_json(const json& j, const NetworkSpec& spec) {
    Parameters params = Parameters::zeros(spec);
    const auto& weights = j.at("weights");
    const auto& biases = j.at("biases");
    if (weights.size() != params.weights.size() || biases.size() != params.biases.size())
        throw std::runtime_error("predictor archive: layer count mismatch");
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        const auto flat = weights[l].get<std::vector<double>>();
        if (flat.size() != params.weights[l].data().size())
            throw std::runtime_error("predictor archive: weight shape mismatch");
        params.weights[l].data() = flat;
        const auto b = biases[l].get<std::vector<double>>();
        if (b.size() != params.biases[l].size())
            throw std::runtime_error("predictor archive: bias shape mismatch");
        params.biases[l] = b;
    }
    return params;
}

json fitted_to_json(const FittedMethod& fit, const Standardization& stz) {
    json j;
    j["kind"] = "iforge-predictor";
    j["tool_version"] = std::string(kToolVersion);
    j["method"] = method_name(fit.method);
    j["p"] = fit.p;
    j["T"] = fit.T;
    j["feature_mean"] = stz.x_stats.mean;
    j["feature_std"] = stz.x_stats.stddev;
    json spec;
    spec["input_dim"] = fit.spec.input_dim;
    spec["hidden_widths"] = fit.spec.hidden_widths;
    spec["output_dim"] = fit.spec.output_dim;
    j["spec"] = spec;
    j["members"] = json::array();
    for (const auto& m : fit.ensemble.members) j["members"].push_back(parameters_to_json(m));
    j["masks"] = json::array();
    for (const auto& mask : fit.ensemble.masks) j["masks"].push_back(mask.keep);
    j["member_seeds"] = fit.ensemble.member_seeds;
    if (fit.has_network) j["network"] = parameters_to_json(fit.network);
    return j;
}

struct LoadedPredictor {
    FittedMethod fit;
    ColumnStats stats;
    bool has_stats = false;
};

LoadedPredictor load_predictor(const json& j) {
    if (j.value("kind", "") != "iforge-predictor")
        throw std::runtime_error("predictor archive: unrecognized format");
    LoadedPredictor loaded;
    FittedMethod& fit = loaded.fit;
    const auto method = parse_method(j.at("method").get<std::string>());
    if (!method) throw std::runtime_error("predictor archive: unknown method");
    fit.method = *method;
    fit.p = j.at("p").get<double>();
    fit.T = j.at("T").get<int>();
    fit.spec.input_dim = j.at("spec").at("input_dim").get<int>();
    fit.spec.hidden_widths = j.at("spec").at("hidden_widths").get<std::vector<int>>();
    fit.spec.output_dim = j.at("spec").at("output_dim").get<int>();
    fit.spec.validate();

    fit.ensemble.spec = fit.spec;
    fit.ensemble.method = fit.method;
    fit.ensemble.retain_prob = fit.p;
    for (const auto& m : j.at("members"))
        fit.ensemble.members.push_back(parameters_from_json(m, fit.spec));
    for (const auto& mj : j.at("masks")) {
        Mask mask;
        mask.keep = mj.get<std::vector<std::vector<std::uint8_t>>>();
        mask.retain_prob = fit.p;
        mask.kind = MaskKind::fixed_structural;
        if (!mask.shaped_for(fit.spec))
            throw std::runtime_error("predictor archive: mask shape mismatch");
        fit.ensemble.masks.push_back(std::move(mask));
    }
    if (j.contains("member_seeds"))
        fit.ensemble.member_seeds = j.at("member_seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("network")) {
        fit.network = parameters_from_json(j.at("network"), fit.spec);
        fit.has_network = true;
    }
    if (!fit.ensemble.masks.empty() && fit.ensemble.masks.size() != fit.ensemble.members.size())
        throw std::runtime_error("predictor archive: mask/member count mismatch");
    if (j.contains("feature_mean") && j.contains("feature_std")) {
        loaded.stats.mean = j.at("feature_mean").get<std::vector<double>>();
        loaded.stats.stddev = j.at("feature_std").get<std::vector<double>>();
        if (loaded.stats.mean.size() != static_cast<std::size_t>(fit.spec.input_dim) ||
            loaded.stats.stddev.size() != static_cast<std::size_t>(fit.spec.input_dim))
            throw std::runtime_error("predictor archive: feature statistics shape mismatch");
        loaded.has_stats = true;
    }
    return loaded;
}

int cmd_predict(const PredictArgs& args) {
    const auto method = parse_method(args.method);
    if (!method) throw UsageError("unknown method '" + args.method + "'");
    for (double a : args.alphas)
        if (!(a > 0.0 && a < 1.0)) throw UsageError("predict: alpha must be in (0, 1)");
    if (args.data_path.empty() && args.ensemble_path.empty())
        throw UsageError("predict: either --data or --ensemble is required");
    if (args.data_path.empty() && args.test_path.empty())
        throw UsageError("predict: --test is required when predicting from an archive");

    const std::string started = iso8601_now();
    const auto t0 = std::chrono::steady_clock::now();
    const json config = predict_config_json(args);
    const std::string hash = config_hash(config);
    const fs::path dir = make_run_dir(args.out_root, hash);

    Dataset train_data;
    bool have_train = false;
    if (!args.data_path.empty()) {
        try {
            train_data = load_csv(args.data_path, args.target_column);
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
        have_train = true;
    }
    Dataset eval_data;
    if (!args.test_path.empty()) {
        try {
            eval_data = load_csv(args.test_path, args.target_column);
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
    } else {
        eval_data = train_data;
    }

    Standardization stz;
    FittedMethod fit;
    if (!args.ensemble_path.empty()) {
        // Archives carry the feature statistics their networks were trained
        // under; fall back to --data only for archives that predate them.
        const json archive = json::parse(read_text_file(args.ensemble_path));
        LoadedPredictor loaded = load_predictor(archive);
        fit = std::move(loaded.fit);
        if (loaded.has_stats) {
            stz.x_stats = std::move(loaded.stats);
        } else if (have_train) {
            std::vector<std::size_t> rows(train_data.n());
            for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
            stz = fit_standardization(train_data, rows, /*scale_target=*/false);
        } else {
            throw UsageError(
                "predict: archive lacks feature statistics; pass --data to refit them");
        }
    } else {
        if (args.T < 2 && *method != Method::delta)
            throw UsageError("predict: T must be at least 2");
        std::vector<std::size_t> rows(train_data.n());
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        stz = fit_standardization(train_data, rows, /*scale_target=*/true);

        NetworkSpec spec;
        spec.input_dim = static_cast<int>(train_data.dim());
        spec.hidden_widths = args.hidden;
        spec.validate();

        TrainConfig train_config;
        train_config.epochs = args.epochs;
        train_config.batch_size =
            std::min<int>(args.batch_size, static_cast<int>(train_data.n()));
        train_config.learning_rate = args.learning_rate;
        train_config.seed = args.seed;

        Dataset std_train = apply_standardization(train_data, stz);
        fit = fit_method(*method, spec, std_train.X, std_train.y, args.T, args.p, train_config);
        // Networks leave training on the raw target scale; intervals and the
        // archive need no separate unscaling step.
        fold_target_scale(fit, stz.y_std, stz.y_mean);
    }

    if (eval_data.dim() != static_cast<std::size_t>(fit.spec.input_dim))
        throw UsageError("predict: evaluation features do not match the trained network");

    Dataset std_eval = eval_data;
    standardize_columns(std_eval.X, stz.x_stats, std_eval.feature_names);

    Matrix std_train_x;
    std::vector<double> train_y;
    const Matrix* train_ptr = nullptr;
    std::span<const double> train_y_span;
    if (fit.method == Method::delta) {
        if (!have_train) throw UsageError("predict: delta method requires --data");
        // Standardized features, raw targets: the folded network already
        // predicts on the raw scale.
        std_train_x = train_data.X;
        standardize_columns(std_train_x, stz.x_stats, train_data.feature_names);
        train_y = train_data.y;
        train_ptr = &std_train_x;
        train_y_span = train_y;
    }

    const IntervalRun run =
        build_intervals(fit, std_eval.X, std_eval.y, args.alphas,
                        derive_seed(args.seed, kPredictEvalSalt), train_ptr, train_y_span);

    std::ostringstream csv;
    csv << "# manifest " << hash << "\n";
    csv << "index,center,epistemic_var,aleatoric_var";
    for (double a : args.alphas)
        csv << ",lower_" << a << ",upper_" << a;
    csv << "\n";
    for (std::size_t i = 0; i < std_eval.n(); ++i) {
        const PredictionInterval& head = run.per_alpha.front()[i];
        csv << i << "," << format_double(head.center) << ","
            << format_double(head.epistemic_var) << "," << format_double(head.aleatoric_var);
        for (const auto& series : run.per_alpha)
            csv << "," << format_double(series[i].lower) << "," << format_double(series[i].upper);
        csv << "\n";
    }
    write_text_file((dir / "intervals.csv").string(), csv.str());

    std::vector<std::string> outputs{"intervals.csv"};
    if (args.plot) {
        write_text_file((dir / "plot.svg").string(),
                        render_interval_plot(run.per_alpha, std_eval.y));
        outputs.push_back("plot.svg");
    }
    if (args.save_ensemble) {
        write_text_file((dir / "ensemble.json").string(),
                        fitted_to_json(fit, stz).dump() + "\n");
        outputs.push_back("ensemble.json");
    }

    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir, config, hash, started, outputs, runtime);
    std::cout << std_eval.n() << " intervals written\n";
    std::cout << "run directory: " << dir.string() << "\n";
    return 0;
}

// ----------------------------------------------------------------------- gen

struct GenArgs {
    std::string dgp = "linear";
    std::size_t n = 1500;
    std::uint64_t seed = 1;
    std::string out_file = "dataset.csv";
};

int cmd_gen(const GenArgs& args) {
    const auto dgp = parse_dgp(args.dgp);
    if (!dgp) throw UsageError("unknown dgp '" + args.dgp + "'");
    if (args.n < 1) throw UsageError("gen: n must be positive");
    const Dataset data = (*dgp == DgpKind::linear) ? gen_linear(args.n, args.seed)
                                                   : gen_nonlinear(args.n, args.seed);
    write_dataset_csv(data, args.out_file);
    std::cout << args.n << " rows written to " << args.out_file << "\n";
    return 0;
}

// --------------------------------------------------------------------- rerun

int cmd_rerun(const std::string& manifest_path, const std::string& out_override) {
    json manifest;
    try {
        manifest = json::parse(read_text_file(manifest_path));
    } catch (const std::exception& e) {
        throw UsageError(std::string("rerun: cannot read manifest: ") + e.what());
    }
    if (!manifest.contains("config") || !manifest["config"].contains("command"))
        throw UsageError("rerun: manifest has no embedded config");
    const json& c = manifest["config"];
    const std::string command = c.at("command").get<std::string>();

    if (command == "simulate") {
        SimulateArgs a;
        a.dgp = c.at("dgp").get<std::string>();
        a.methods = c.at("methods").get<std::vector<std::string>>();
        a.T_values = c.at("T").get<std::vector<int>>();
        a.p_values = c.at("p").get<std::vector<double>>();
        a.alphas = c.at("alpha").get<std::vector<double>>();
        a.n_train = c.at("n_train").get<std::size_t>();
        a.n_test = c.at("n_test").get<std::size_t>();
        a.replications = c.at("replications").get<int>();
        a.seed = c.at("seed").get<std::uint64_t>();
        if (!out_override.empty()) a.out_root = out_override;
        return cmd_simulate(a);
    }
    if (command == "benchmark") {
        BenchmarkArgs a;
        a.data_path = c.at("data").get<std::string>();
        a.target_column = c.at("target").get<std::string>();
        a.method = c.at("method").get<std::string>();
        a.T = c.at("T").get<int>();
        a.splits = c.at("splits").get<int>();
        a.p = c.at("p").get<double>();
        a.epochs = c.at("epochs").get<int>();
        a.learning_rate = c.at("learning_rate").get<double>();
        a.seed = c.at("seed").get<std::uint64_t>();
        a.allow_huge = c.at("allow_huge").get<bool>();
        if (!out_override.empty()) a.out_root = out_override;
        return cmd_benchmark(a);
    }
    if (command == "predict") {
        PredictArgs a;
        a.data_path = c.at("data").get<std::string>();
        a.test_path = c.at("test").get<std::string>();
        a.target_column = c.at("target").get<std::string>();
        a.method = c.at("method").get<std::string>();
        a.T = c.at("T").get<int>();
        a.p = c.at("p").get<double>();
        a.alphas = c.at("alpha").get<std::vector<double>>();
        a.hidden = c.at("hidden").get<std::vector<int>>();
        a.epochs = c.at("epochs").get<int>();
        a.batch_size = c.at("batch_size").get<int>();
        a.learning_rate = c.at("learning_rate").get<double>();
        a.seed = c.at("seed").get<std::uint64_t>();
        a.plot = c.at("plot").get<bool>();
        a.ensemble_path = c.at("ensemble").get<std::string>();
        a.save_ensemble = c.at("save_ensemble").get<bool>();
        if (!out_override.empty()) a.out_root = out_override;
        return cmd_predict(a);
    }
    throw UsageError("rerun: unknown command '" + command + "'");
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"prediction intervals for feedforward ReLU networks"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "coverage study on a simulated process");
    simulate->add_option("--dgp", sim.dgp, "linear or nonlinear");
    simulate->add_option("--method", sim.methods,
                         "delta, boot_percentile, boot_normal, boot_bias, boot_mean, "
                         "mc_dropout, extra_nn")
        ->delimiter(',');
    simulate->add_option("--T", sim.T_values, "ensemble sizes / forward passes")->delimiter(',');
    simulate->add_option("--p", sim.p_values, "retention probabilities")->delimiter(',');
    simulate->add_option("--alpha", sim.alphas, "significance levels")->delimiter(',');
    simulate->add_option("--n-train", sim.n_train, "training rows per replication");
    simulate->add_option("--n-test", sim.n_test, "test rows per replication");
    simulate->add_option("--replications", sim.replications, "independent replications");
    simulate->add_option("--seed", sim.seed, "master seed");
    simulate->add_option("--out", sim.out_root, "output root directory");

    BenchmarkArgs bench;
    CLI::App* benchmark = app.add_subcommand("benchmark", "repeated-split RMSPE on a CSV dataset");
    benchmark->add_option("--data", bench.data_path, "dataset CSV with header")->required();
    benchmark->add_option("--target", bench.target_column, "target column name")->required();
    benchmark->add_option("--method", bench.method, "extra_nn, mc_dropout or single");
    benchmark->add_option("--T", bench.T, "ensemble size / forward passes");
    benchmark->add_option("--splits", bench.splits, "number of random splits (default by tier)");
    benchmark->add_option("--p", bench.p, "retention probability");
    benchmark->add_option("--epochs", bench.epochs, "training epochs");
    benchmark->add_option("--lr", bench.learning_rate, "learning rate");
    benchmark->add_option("--seed", bench.seed, "master seed");
    benchmark->add_option("--out", bench.out_root, "output root directory");
    benchmark->add_flag("--allow-huge", bench.allow_huge, "permit datasets above 100k rows");

    PredictArgs pred;
    CLI::App* predict = app.add_subcommand("predict", "per-point intervals for a CSV dataset");
    predict->add_option("--data", pred.data_path, "training CSV with header");
    predict->add_option("--test", pred.test_path, "evaluation CSV (defaults to --data)");
    predict->add_option("--target", pred.target_column, "target column name")->required();
    predict->add_option("--method", pred.method, "interval method");
    predict->add_option("--T", pred.T, "ensemble size / forward passes");
    predict->add_option("--p", pred.p, "retention probability");
    predict->add_option("--alpha", pred.alphas, "significance levels")->delimiter(',');
    predict->add_option("--hidden", pred.hidden, "hidden layer widths")->delimiter(',');
    predict->add_option("--epochs", pred.epochs, "training epochs");
    predict->add_option("--batch", pred.batch_size, "batch size");
    predict->add_option("--lr", pred.learning_rate, "learning rate");
    predict->add_option("--seed", pred.seed, "master seed");
    predict->add_option("--out", pred.out_root, "output root directory");
    predict->add_flag("--plot", pred.plot, "write an SVG interval plot");
    predict->add_option("--ensemble", pred.ensemble_path, "load a predictor archive");
    predict->add_flag("--save-ensemble", pred.save_ensemble, "archive the fitted predictor");

    GenArgs gen;
    CLI::App* generate = app.add_subcommand("gen", "write a simulated dataset to CSV");
    generate->add_option("--dgp", gen.dgp, "linear or nonlinear");
    generate->add_option("--n", gen.n, "number of rows");
    generate->add_option("--seed", gen.seed, "master seed");
    generate->add_option("--out", gen.out_file, "output CSV path");

    std::string rerun_manifest;
    std::string rerun_out;
    CLI::App* rerun = app.add_subcommand("rerun", "re-execute a run from its manifest");
    rerun->add_option("manifest", rerun_manifest, "path to manifest.json")->required();
    rerun->add_option("--out", rerun_out, "output root directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        std::cout << kToolVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (benchmark->parsed()) return cmd_benchmark(bench);
        if (predict->parsed()) return cmd_predict(pred);
        if (generate->parsed()) return cmd_gen(gen);
        if (rerun->parsed()) return cmd_rerun(rerun_manifest, rerun_out);
        std::cerr << app.help();
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace iforge

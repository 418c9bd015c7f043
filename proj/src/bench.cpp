#include "iforge/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "iforge/intervals.hpp"
#include "iforge/network.hpp"
#include "iforge/parallel.hpp"
#include "iforge/rng.hpp"
#include "iforge/stats.hpp"

namespace iforge {

namespace {

constexpr std::uint64_t kSplitPermSalt = 0x73706c74ULL;
constexpr std::uint64_t kSplitFitSalt = 0x73666974ULL;
constexpr std::uint64_t kMcEvalSalt = 0x6d637376ULL;

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

bool parse_cell(const std::string& cell, double& out) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    if (begin == end) return false;
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

void warn_on_manifest_mismatch(const std::string& path, std::size_t rows, std::size_t cols) {
    namespace fs = std::filesystem;
    const fs::path csv(path);
    const fs::path manifest_path = csv.parent_path() / "manifest.json";
    std::error_code ec;
    if (!fs::exists(manifest_path, ec)) return;
    try {
        std::ifstream in(manifest_path);
        const nlohmann::json manifest = nlohmann::json::parse(in);
        const std::string key = csv.filename().string();
        if (!manifest.contains(key)) return;
        const auto expected_rows = manifest[key].value("rows", std::size_t{0});
        const auto expected_cols = manifest[key].value("cols", std::size_t{0});
        if (expected_rows != rows || expected_cols != cols)
            std::cerr << "warning: " << key << " has " << rows << " rows x " << cols
                      << " cols, manifest expects " << expected_rows << " x " << expected_cols
                      << "\n";
    } catch (const std::exception& e) {
        std::cerr << "warning: could not read " << manifest_path.string() << ": " << e.what()
                  << "\n";
    }
}

}  // namespace

std::string bench_method_name(BenchMethod m) {
    switch (m) {
        case BenchMethod::extra_nn: return "extra_nn";
        case BenchMethod::mc_dropout: return "mc_dropout";
        case BenchMethod::single: return "single";
    }
    return "unknown";
}

std::optional<BenchMethod> parse_bench_method(std::string_view name) {
    if (name == "extra_nn") return BenchMethod::extra_nn;
    if (name == "mc_dropout") return BenchMethod::mc_dropout;
    if (name == "single") return BenchMethod::single;
    return std::nullopt;
}

Dataset load_csv(const std::string& path, const std::string& target_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file " + path);
    const std::vector<std::string> header = split_line(line);

    std::size_t target_idx = header.size();
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == target_column) target_idx = j;
    if (target_idx == header.size())
        throw std::runtime_error("load_csv: missing target column '" + target_column + "'");

    Dataset data;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (j != target_idx) data.feature_names.push_back(header[j]);

    std::vector<double> flat;
    std::size_t n_rows = 0;
    std::size_t row_index = 0;
    while (std::getline(in, line)) {
        ++row_index;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error("load_csv: row " + std::to_string(row_index) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        for (std::size_t j = 0; j < cells.size(); ++j) {
            double v = 0.0;
            if (!parse_cell(cells[j], v))
                throw std::runtime_error("load_csv: row " + std::to_string(row_index) +
                                         ": non-numeric cell in column '" + header[j] + "'");
            if (j == target_idx)
                data.y.push_back(v);
            else
                flat.push_back(v);
        }
        ++n_rows;
    }
    if (n_rows == 0) throw std::runtime_error("load_csv: empty file " + path);

    const std::size_t d = header.size() - 1;
    data.X = Matrix(n_rows, d);
    std::copy(flat.begin(), flat.end(), data.X.data().begin());
    warn_on_manifest_mismatch(path, n_rows, header.size());
    return data;
}

std::vector<SplitIndices> split_protocol(std::size_t n, int n_splits, double train_fraction,
                                         std::uint64_t master_seed) {
    if (n < 10) throw std::invalid_argument("split_protocol: need at least 10 rows");
    if (n_splits < 1) throw std::invalid_argument("split_protocol: n_splits must be positive");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("split_protocol: train fraction must be in (0, 1)");

    const auto train_size = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(n)));
    std::vector<SplitIndices> splits(static_cast<std::size_t>(n_splits));
    for (std::size_t s = 0; s < splits.size(); ++s) {
        Rng rng(derive_seed(derive_seed(master_seed, kSplitPermSalt), s));
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = n; i-- > 1;) {
            const std::size_t j = rng.uniform_index(i + 1);
            std::swap(perm[i], perm[j]);
        }
        splits[s].train.assign(perm.begin(),
                               perm.begin() + static_cast<std::ptrdiff_t>(train_size));
        splits[s].test.assign(perm.begin() + static_cast<std::ptrdiff_t>(train_size), perm.end());
    }
    return splits;
}

void BenchmarkConfig::apply_tier_defaults(std::size_t rows, bool splits_overridden) {
    if (rows >= kHugeRows) {
        hidden_width = 100;
        if (!splits_overridden) n_splits = 1;
    } else if (rows >= kLargeRows) {
        hidden_width = 100;
        if (!splits_overridden) n_splits = 5;
    }
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config, const Dataset& data) {
    if (config.ensemble_size < 1)
        throw std::invalid_argument("run_benchmark: ensemble size must be positive");
    const auto start_time = std::chrono::steady_clock::now();

    const std::vector<SplitIndices> splits =
        split_protocol(data.n(), config.n_splits, config.train_fraction, config.seed);

    NetworkSpec spec;
    spec.input_dim = static_cast<int>(data.dim());
    spec.hidden_widths = {config.hidden_width};
    spec.validate();

    BenchmarkResult result;
    result.per_split_rmspe.resize(splits.size());

    parallel_for(splits.size(), [&](std::size_t s) {
        const SplitIndices& split = splits[s];
        const Standardization stz = fit_standardization(data, split.train, /*scale_target=*/true);

        Matrix x_train(split.train.size(), data.dim());
        std::vector<double> y_train(split.train.size());
        for (std::size_t i = 0; i < split.train.size(); ++i) {
            const double* src = data.X.row(split.train[i]);
            double* dst = x_train.row(i);
            for (std::size_t j = 0; j < data.dim(); ++j)
                dst[j] = (src[j] - stz.x_stats.mean[j]) / stz.x_stats.stddev[j];
            y_train[i] = (data.y[split.train[i]] - stz.y_mean) / stz.y_std;
        }

        TrainConfig train_config;
        train_config.epochs = config.epochs;
        train_config.batch_size = std::min<int>(config.batch_size,
                                                static_cast<int>(split.train.size()));
        train_config.learning_rate = config.learning_rate;
        train_config.seed = derive_seed(derive_seed(config.seed, kSplitFitSalt), s);

        std::vector<double> predictions(split.test.size());
        auto test_row = [&](std::size_t i, std::vector<double>& buf) {
            const double* src = data.X.row(split.test[i]);
            for (std::size_t j = 0; j < data.dim(); ++j)
                buf[j] = (src[j] - stz.x_stats.mean[j]) / stz.x_stats.stddev[j];
        };

        std::vector<double> x(data.dim());
        switch (config.method) {
            case BenchMethod::extra_nn: {
                const Ensemble ens = extra_nn_fit(x_train, y_train, config.ensemble_size,
                                                  config.retain_prob, spec, train_config);
                for (std::size_t i = 0; i < split.test.size(); ++i) {
                    test_row(i, x);
                    predictions[i] = ensemble_predict(ens, x).mean;
                }
                break;
            }
            case BenchMethod::mc_dropout: {
                const Parameters net =
                    train_with_restarts(spec, x_train, y_train, train_config,
                                        MaskMode::per_step_dropout, nullptr, config.retain_prob);
                const std::uint64_t eval_seed = derive_seed(train_config.seed, kMcEvalSalt);
                for (std::size_t i = 0; i < split.test.size(); ++i) {
                    test_row(i, x);
                    const std::vector<double> samples =
                        mc_dropout_predict(spec, net, x, config.ensemble_size, config.retain_prob,
                                           derive_seed(eval_seed, i));
                    predictions[i] = mean(samples);
                }
                break;
            }
            case BenchMethod::single: {
                const Parameters net = train_with_restarts(spec, x_train, y_train, train_config);
                for (std::size_t i = 0; i < split.test.size(); ++i) {
                    test_row(i, x);
                    predictions[i] = predict(spec, net, x);
                }
                break;
            }
        }

        double sq = 0.0;
        for (std::size_t i = 0; i < split.test.size(); ++i) {
            const double pred_raw = unscale_prediction(predictions[i], stz);
            const double err = data.y[split.test[i]] - pred_raw;
            sq += err * err;
        }
        result.per_split_rmspe[s] = std::sqrt(sq / static_cast<double>(split.test.size()));
    });

    result.mean_rmspe = mean(result.per_split_rmspe);
    if (result.per_split_rmspe.size() >= 2)
        result.se = sample_std(result.per_split_rmspe) /
                    std::sqrt(static_cast<double>(result.per_split_rmspe.size()));
    result.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
                           .count();
    return result;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
    const Dataset data = load_csv(config.data_path, config.target_column);
    BenchmarkConfig resolved = config;
    resolved.apply_tier_defaults(data.n(), /*splits_overridden=*/false);
    if (data.n() >= BenchmarkConfig::kHugeRows && !config.allow_huge)
        throw std::runtime_error(
            "run_benchmark: dataset exceeds the huge tier; pass allow_huge to run it");
    return run_benchmark(resolved, data);
}

}  // namespace iforge

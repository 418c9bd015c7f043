#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iforge/dgp.hpp"

namespace iforge {

enum class BenchMethod { extra_nn, mc_dropout, single };

std::string bench_method_name(BenchMethod m);
std::optional<BenchMethod> parse_bench_method(std::string_view name);

// Loads a numeric CSV with a header row. Features are all non-target columns
// in file order. A blank or non-numeric cell fails with its row index. When
// a manifest.json sits next to the file, shape mismatches are warned about.
Dataset load_csv(const std::string& path, const std::string& target_column);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// n_splits independent uniform permutations under the master seed;
// train size = floor(train_fraction * n), disjoint and exhaustive per split.
std::vector<SplitIndices> split_protocol(std::size_t n, int n_splits, double train_fraction,
                                         std::uint64_t master_seed);

struct BenchmarkConfig {
    std::string data_path;
    std::string target_column;
    BenchMethod method = BenchMethod::extra_nn;
    int ensemble_size = 5;  // members for extra_nn, forward passes for mc_dropout
    int n_splits = 20;
    double train_fraction = 0.90;
    int hidden_width = 50;
    int epochs = 40;
    double retain_prob = 0.95;  // dropout rate 0.05
    int batch_size = 32;
    double learning_rate = 0.01;
    std::uint64_t seed = 0;
    bool allow_huge = false;

    // Scale tiers: large datasets run wider and with fewer splits, and the
    // huge tier is refused unless allow_huge is set.
    static constexpr std::size_t kLargeRows = 20000;  // protein-scale
    static constexpr std::size_t kHugeRows = 100000;  // year-MSD-scale
    void apply_tier_defaults(std::size_t rows, bool splits_overridden);
};

struct BenchmarkResult {
    std::vector<double> per_split_rmspe;
    double mean_rmspe = 0.0;
    std::optional<double> se;  // absent when n_splits == 1
    double runtime_s = 0.0;
};

BenchmarkResult run_benchmark(const BenchmarkConfig& config, const Dataset& data);
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

}  // namespace iforge

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "iforge/bench.hpp"
#include "iforge/rng.hpp"
#include "iforge/stats.hpp"

using namespace iforge;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& label) {
    const fs::path dir = fs::temp_directory_path() / ("iforge_bench_" + label);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

// Synthetic regression CSV: y = 2 a - b + noise_sd * eps.
fs::path synthetic_csv(const std::string& label, std::size_t n, double noise_sd,
                       double target_scale = 1.0) {
    const fs::path path = temp_dir(label) / "data.csv";
    std::ofstream out(path);
    out << "a,b,y\n";
    Rng rng(2024);
    out.precision(17);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.normal(0.0, 1.0);
        const double b = rng.normal(0.0, 1.0);
        const double y = target_scale * (5.0 + 2.0 * a - b + noise_sd * rng.normal());
        out << a << "," << b << "," << y << "\n";
    }
    return path;
}

}  // namespace

TEST_CASE("load_csv reads features in file order") {
    const fs::path path = temp_dir("basic") / "t.csv";
    write_file(path, "a,b,y\n1,2,3\n4,5,6\n7,8,9\n");
    const Dataset data = load_csv(path.string(), "y");
    CHECK(data.n() == 3);
    CHECK(data.dim() == 2);
    CHECK(data.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(data.X(1, 0) == 4.0);
    CHECK(data.X(2, 1) == 8.0);
    CHECK(data.y == std::vector<double>{3.0, 6.0, 9.0});
}

TEST_CASE("load_csv accepts a target column anywhere") {
    const fs::path path = temp_dir("target_mid") / "t.csv";
    write_file(path, "a,y,b\n1,3,2\n");
    const Dataset data = load_csv(path.string(), "y");
    CHECK(data.dim() == 2);
    CHECK(data.X(0, 0) == 1.0);
    CHECK(data.X(0, 1) == 2.0);
    CHECK(data.y[0] == 3.0);
}

TEST_CASE("load_csv error paths") {
    const fs::path dir = temp_dir("errors");
    write_file(dir / "empty.csv", "");
    CHECK_THROWS_WITH_AS(load_csv((dir / "empty.csv").string(), "y"),
                         doctest::Contains("empty file"), std::runtime_error);

    write_file(dir / "header_only.csv", "a,y\n");
    CHECK_THROWS_WITH_AS(load_csv((dir / "header_only.csv").string(), "y"),
                         doctest::Contains("empty file"), std::runtime_error);

    write_file(dir / "no_target.csv", "a,b\n1,2\n");
    CHECK_THROWS_WITH_AS(load_csv((dir / "no_target.csv").string(), "y"),
                         doctest::Contains("missing target column 'y'"), std::runtime_error);

    write_file(dir / "blank_cell.csv", "a,y\n1,2\n,4\n");
    CHECK_THROWS_WITH_AS(load_csv((dir / "blank_cell.csv").string(), "y"),
                         doctest::Contains("row 2"), std::runtime_error);

    write_file(dir / "non_numeric.csv", "a,y\n1,2\n3,oops\n");
    CHECK_THROWS_WITH_AS(load_csv((dir / "non_numeric.csv").string(), "y"),
                         doctest::Contains("non-numeric cell in column 'y'"), std::runtime_error);

    write_file(dir / "ragged.csv", "a,y\n1,2,3\n");
    CHECK_THROWS_AS(load_csv((dir / "ragged.csv").string(), "y"), std::runtime_error);

    CHECK_THROWS_AS(load_csv((dir / "missing.csv").string(), "y"), std::runtime_error);
}

TEST_CASE("load_csv tolerates a dataset manifest and windows line endings") {
    const fs::path dir = temp_dir("manifest");
    write_file(dir / "t.csv", "a,y\r\n1,2\r\n3,4\r\n");
    write_file(dir / "manifest.json", R"({"t.csv": {"rows": 2, "cols": 2}})");
    const Dataset data = load_csv((dir / "t.csv").string(), "y");
    CHECK(data.n() == 2);
    CHECK(data.X(1, 0) == 3.0);
    // A mismatching manifest only warns.
    write_file(dir / "manifest.json", R"({"t.csv": {"rows": 99, "cols": 2}})");
    CHECK_NOTHROW(load_csv((dir / "t.csv").string(), "y"));
}

TEST_CASE("split protocol sizes and partition") {
    const auto splits = split_protocol(506, 20, 0.90, 31);
    CHECK(splits.size() == 20);
    std::set<std::vector<std::size_t>> seen_tests;
    for (const auto& split : splits) {
        CHECK(split.train.size() == 455);
        CHECK(split.test.size() == 51);
        std::set<std::size_t> all(split.train.begin(), split.train.end());
        all.insert(split.test.begin(), split.test.end());
        CHECK(all.size() == 506);  // disjoint and exhaustive
        seen_tests.insert(split.test);
    }
    CHECK(seen_tests.size() > 1);  // splits are actually different

    const auto again = split_protocol(506, 20, 0.90, 31);
    for (std::size_t s = 0; s < 20; ++s) {
        CHECK(splits[s].train == again[s].train);
        CHECK(splits[s].test == again[s].test);
    }

    CHECK_THROWS_AS(split_protocol(5, 1, 0.9, 0), std::invalid_argument);
    CHECK_THROWS_AS(split_protocol(100, 0, 0.9, 0), std::invalid_argument);
    CHECK_THROWS_AS(split_protocol(100, 1, 1.0, 0), std::invalid_argument);
}

TEST_CASE("standardization statistics come from the training fold only") {
    Dataset data;
    data.X = Matrix(10, 1);
    data.y.resize(10);
    for (std::size_t i = 0; i < 10; ++i) {
        data.X(i, 0) = static_cast<double>(i);
        data.y[i] = static_cast<double>(i);
    }
    // Planted outlier sits in the test fold.
    data.X(9, 0) = 1e6;

    std::vector<std::size_t> train_rows{0, 1, 2, 3, 4, 5, 6, 7};
    const Standardization leak_free = fit_standardization(data, train_rows, true);
    // Independent recomputation over the train rows.
    double m = 0.0;
    for (std::size_t r : train_rows) m += data.X(r, 0);
    m /= 8.0;
    CHECK(leak_free.x_stats.mean[0] == doctest::Approx(m));
    CHECK(leak_free.x_stats.mean[0] < 10.0);  // untouched by the outlier

    std::vector<std::size_t> all_rows{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    const Standardization leaky = fit_standardization(data, all_rows, true);
    CHECK(leaky.x_stats.mean[0] > 1e4);  // leaking the test fold is detectable
}

TEST_CASE("near-constant targets give near-zero RMSPE") {
    const fs::path csv = synthetic_csv("const", 120, 0.0);
    // Overwrite with an almost-constant target.
    std::ofstream out(csv);
    out << "a,b,y\n";
    Rng rng(5);
    out.precision(17);
    for (int i = 0; i < 120; ++i)
        out << rng.normal() << "," << rng.normal() << "," << 5.0 + 1e-3 * rng.normal() << "\n";
    out.close();

    BenchmarkConfig config;
    config.method = BenchMethod::single;
    config.n_splits = 3;
    config.hidden_width = 8;
    config.epochs = 20;
    config.seed = 1;
    const Dataset data = load_csv(csv.string(), "y");
    const BenchmarkResult result = run_benchmark(config, data);
    CHECK(result.mean_rmspe < 5e-3);
}

TEST_CASE("RMSPE is affine-equivariant in the target scale") {
    const fs::path base_csv = synthetic_csv("affine1", 150, 0.3, 1.0);
    const fs::path scaled_csv = synthetic_csv("affine2", 150, 0.3, 10.0);

    BenchmarkConfig config;
    config.method = BenchMethod::single;
    config.n_splits = 2;
    config.hidden_width = 6;
    config.epochs = 10;
    config.seed = 7;
    const BenchmarkResult base = run_benchmark(config, load_csv(base_csv.string(), "y"));
    const BenchmarkResult scaled = run_benchmark(config, load_csv(scaled_csv.string(), "y"));
    CHECK(scaled.mean_rmspe == doctest::Approx(10.0 * base.mean_rmspe).epsilon(1e-9));
}

TEST_CASE("reported standard error equals an independent reduction") {
    const fs::path csv = synthetic_csv("se", 140, 0.5);
    BenchmarkConfig config;
    config.method = BenchMethod::single;
    config.n_splits = 5;
    config.hidden_width = 6;
    config.epochs = 8;
    config.seed = 3;
    const BenchmarkResult result = run_benchmark(config, load_csv(csv.string(), "y"));
    REQUIRE(result.se.has_value());
    REQUIRE(result.per_split_rmspe.size() == 5);

    double m = 0.0;
    for (double v : result.per_split_rmspe) m += v;
    m /= 5.0;
    double sq = 0.0;
    for (double v : result.per_split_rmspe) sq += (v - m) * (v - m);
    const double se = std::sqrt(sq / 4.0) / std::sqrt(5.0);
    CHECK(*result.se == doctest::Approx(se).epsilon(1e-12));
    CHECK(result.mean_rmspe == doctest::Approx(m).epsilon(1e-12));
}

TEST_CASE("a single split reports no standard error") {
    const fs::path csv = synthetic_csv("single_split", 80, 0.5);
    BenchmarkConfig config;
    config.method = BenchMethod::single;
    config.n_splits = 1;
    config.hidden_width = 4;
    config.epochs = 4;
    const BenchmarkResult result = run_benchmark(config, load_csv(csv.string(), "y"));
    CHECK_FALSE(result.se.has_value());
}

TEST_CASE("ensemble and dropout methods run through the harness") {
    const fs::path csv = synthetic_csv("methods", 100, 0.4);
    const Dataset data = load_csv(csv.string(), "y");
    BenchmarkConfig config;
    config.n_splits = 2;
    config.hidden_width = 6;
    config.epochs = 6;
    config.ensemble_size = 3;
    config.seed = 11;

    config.method = BenchMethod::extra_nn;
    const BenchmarkResult extra = run_benchmark(config, data);
    CHECK(extra.per_split_rmspe.size() == 2);
    CHECK(std::isfinite(extra.mean_rmspe));

    config.method = BenchMethod::mc_dropout;
    const BenchmarkResult mc = run_benchmark(config, data);
    CHECK(std::isfinite(mc.mean_rmspe));

    // Identical configuration reproduces identical numbers.
    const BenchmarkResult again = run_benchmark(config, data);
    CHECK(mc.per_split_rmspe == again.per_split_rmspe);
}

TEST_CASE("scale tiers adjust width and split count") {
    BenchmarkConfig config;
    config.apply_tier_defaults(506, false);
    CHECK(config.hidden_width == 50);
    CHECK(config.n_splits == 20);

    BenchmarkConfig protein;
    protein.apply_tier_defaults(45730, false);
    CHECK(protein.hidden_width == 100);
    CHECK(protein.n_splits == 5);

    BenchmarkConfig huge;
    huge.apply_tier_defaults(515345, false);
    CHECK(huge.hidden_width == 100);
    CHECK(huge.n_splits == 1);

    BenchmarkConfig overridden;
    overridden.apply_tier_defaults(45730, true);
    CHECK(overridden.n_splits == 20);  // explicit split count wins
}

TEST_CASE("bench method names round-trip") {
    for (BenchMethod m : {BenchMethod::extra_nn, BenchMethod::mc_dropout, BenchMethod::single})
        CHECK(parse_bench_method(bench_method_name(m)) == m);
    CHECK_FALSE(parse_bench_method("boot_mean").has_value());
}

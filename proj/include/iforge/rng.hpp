#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace iforge {

// SplitMix64 finalizer; good avalanche, used to spread seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a master seed and a salt.
// Every component that needs its own random stream (ensemble member,
// replication, shuffle order, mask draw, ...) goes through this so that
// results are reproducible regardless of execution order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) {
    return mix64(mix64(master) ^ mix64(salt ^ 0xa5a5a5a5a5a5a5a5ULL));
}

// Deterministic random stream. Wraps mt19937_64 with explicit Box-Muller
// normals so draws do not depend on standard-library distribution internals.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1].
    double uniform_open0() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller with one cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open0();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform index in [0, n). Fixed-point multiply keeps it fast and
    // deterministic; bias is negligible for the index ranges used here.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace iforge

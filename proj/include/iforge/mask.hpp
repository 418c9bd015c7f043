#pragma once

#include <cstdint>
#include <vector>

#include "iforge/network.hpp"

namespace iforge {

enum class MaskKind {
    per_step,          // resampled every training batch, inverted scaling
    test_stochastic,   // resampled per forward pass at test time, inverted scaling
    fixed_structural,  // drawn before training, held fixed, no scaling
};

// Bernoulli retention pattern over the hidden units of a network. Masks
// never touch the input or output layer.
struct Mask {
    std::vector<std::vector<std::uint8_t>> keep;  // one bit vector per hidden layer
    double retain_prob = 1.0;
    MaskKind kind = MaskKind::fixed_structural;

    bool scaled() const { return kind != MaskKind::fixed_structural; }
    bool shaped_for(const NetworkSpec& spec) const;
    std::size_t retained_count() const;
};

// I.i.d. Bernoulli(p) retention bits over all hidden units, deterministic
// given seed. Fixed structural masks resample any all-zero layer so every
// hidden layer keeps at least one unit.
Mask sample_mask(const NetworkSpec& spec, double p, std::uint64_t seed, MaskKind kind);

// Variance of a Bernoulli(p) draw, p(1-p).
double bernoulli_variance(double p);

}  // namespace iforge

#include "iforge/mask.hpp"

#include <algorithm>
#include <stdexcept>

#include "iforge/rng.hpp"

namespace iforge {

bool Mask::shaped_for(const NetworkSpec& spec) const {
    if (keep.size() != spec.hidden_widths.size()) return false;
    for (std::size_t l = 0; l < keep.size(); ++l)
        if (keep[l].size() != static_cast<std::size_t>(spec.hidden_widths[l])) return false;
    return true;
}

std::size_t Mask::retained_count() const {
    std::size_t n = 0;
    for (const auto& layer : keep)
        for (auto bit : layer) n += bit;
    return n;
}

Mask sample_mask(const NetworkSpec& spec, double p, std::uint64_t seed, MaskKind kind) {
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("sample_mask: retention probability must be in (0, 1]");
    spec.validate();

    Rng rng(seed);
    Mask mask;
    mask.retain_prob = p;
    mask.kind = kind;
    mask.keep.resize(spec.hidden_widths.size());
    for (std::size_t l = 0; l < mask.keep.size(); ++l) {
        auto& layer = mask.keep[l];
        layer.resize(static_cast<std::size_t>(spec.hidden_widths[l]));
        for (auto& bit : layer) bit = rng.bernoulli(p) ? 1 : 0;
        if (kind == MaskKind::fixed_structural) {
            // An empty hidden layer leaves the sub-network undefined; redraw.
            while (std::count(layer.begin(), layer.end(), std::uint8_t{1}) == 0)
                for (auto& bit : layer) bit = rng.bernoulli(p) ? 1 : 0;
        }
    }
    return mask;
}

double bernoulli_variance(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("bernoulli_variance: p must be in [0, 1]");
    return p * (1.0 - p);
}

}  // namespace iforge

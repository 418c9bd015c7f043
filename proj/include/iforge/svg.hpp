#pragma once

#include <string>
#include <vector>

#include "iforge/intervals.hpp"

namespace iforge {

// Static SVG of interval bands over test points sorted by prediction:
// one shaded band per significance level (widest drawn first), the center
// trace, and target dots when available.
std::string render_interval_plot(const std::vector<std::vector<PredictionInterval>>& per_alpha,
                                 const std::vector<double>& targets);

}  // namespace iforge

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace iforge {

// Inverse standard-normal CDF. Rational approximation refined with one
// Halley step against erfc, giving better than 1e-9 accuracy on (0, 1).
double normal_quantile(double p);

// z_{1-alpha/2}, the two-sided critical value at significance alpha.
double two_sided_z(double alpha);

double mean(std::span<const double> v);

// Population variance (divide by n). Returns exactly 0 when all entries are
// identical so that degenerate ensembles report zero spread bit-exactly.
double population_variance(std::span<const double> v);

// Sample standard deviation (divide by n-1); n < 2 yields 0.
double sample_std(std::span<const double> v);

// Quantile by linear interpolation between order statistics at 1-indexed
// position 1 + (n-1) q. Input must be sorted ascending.
double interpolated_quantile_sorted(std::span<const double> sorted, double q);

// Convenience: copies, sorts, interpolates.
double interpolated_quantile(std::span<const double> v, double q);

}  // namespace iforge

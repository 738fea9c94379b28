#pragma once

#include "umlab/types.hpp"

#include <cstddef>

namespace umlab {

/// A Monte Carlo estimate with its standard error.
struct MCStat {
    double value = 0.0;
    double se = 0.0;
    Index n = 0;

    /// Half-width of the 3-standard-error band used throughout.
    double band() const { return 3.0 * se; }
};

/// Pairwise (tree) summation: deterministic order independent of any
/// parallel decomposition, and O(log n) rounding growth at n = 1e6.
double pairwise_sum(const double* data, Index n);
double pairwise_sum(const Vec& v);

/// Sample mean with standard error of the mean.
MCStat mc_mean(const Vec& samples);

/// Mean of the coupled difference a - b (paired standard error).
MCStat mc_mean_diff(const Vec& a, const Vec& b);

}  // namespace umlab

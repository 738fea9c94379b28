#pragma once

namespace umlab {

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal distribution function, accurate in both tails
/// (erfc-based, relative accuracy down to probabilities near 1e-300).
double norm_cdf(double x);

/// Inverse of norm_cdf on (0,1), rational approximation refined by one
/// Halley step.  Relative accuracy in the argument better than 1e-13
/// across the whole tail range, which is what the extreme quantiles of
/// the instability construction require.
double norm_quantile(double p);

/// Unrefined rational approximation (Acklam), relative error ~1e-9.
/// Used for bulk sampling where the error is far below Monte Carlo
/// resolution; parameter-level quantiles go through norm_quantile.
double norm_quantile_fast(double p);

}  // namespace umlab

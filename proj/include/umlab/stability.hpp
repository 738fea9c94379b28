#pragma once

#include "umlab/duality.hpp"
#include "umlab/market.hpp"
#include "umlab/preferences.hpp"
#include "umlab/types.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace umlab {

/// Empirical Ky Fan functional on coupled samples:
/// inf { eps >= 0 : fraction(|a - b| > eps) <= eps }.
/// Metrizes convergence in probability; 0 iff the samples coincide.
double ky_fan_distance(const Vec& a, const Vec& b);

/// Uniform-integrability certificate for a family of terminal deflator
/// samples: tail_curve[j] = sup over the family of
/// mean[ V+(Z_T) 1{V+(Z_T) > k_grid[j]} ].
struct UICertificate {
    Vec k_grid;
    Vec tail_curve;
    double threshold = 1e-2;
    bool pass = false;  // tail at the largest truncation level below threshold
};

UICertificate v_relative_compactness_diag(const std::vector<Vec>& z_family, const UtilityPair& u,
                                          const Vec& k_grid, double threshold = 1e-2);

/// A sequence of markets evaluated on one shared driver ensemble, so
/// that convergence in probability of derived quantities is measurable
/// pathwise.
struct MarketSequence {
    RiskProcess limit;
    std::vector<std::pair<int, RiskProcess>> terms;  // (index n, market)
    std::shared_ptr<const PathEnsemble> ensemble;
};

/// lambda^n = base * (1 + 1/n) with limit lambda = base.
MarketSequence scaled_constant_sequence(double base, const std::vector<int>& indices,
                                        std::shared_ptr<const PathEnsemble> ensemble);

/// Terminal-density counterexample markets with limit lambda = 0.
MarketSequence counterexample_sequence(const std::vector<int>& indices,
                                       std::shared_ptr<const PathEnsemble> ensemble);

struct ConvergenceRow {
    int n = 0;
    double l2_distance = 0.0;
    double ucp_distance = 0.0;
    double value_gap = 0.0;
    double multiplier = 0.0;
    double wealth_kyfan = 0.0;
    double deflator_kyfan = 0.0;
    std::string error;  // empty on success; solver failures are recorded, not thrown
};

/// Solves every market of the sequence on the coupled ensemble and
/// reports topology distances, value gaps, multipliers and Ky Fan
/// distances of terminal quantities against the limit market.
std::vector<ConvergenceRow> stability_sweep(const MarketSequence& seq, const UtilityPair& u,
                                            double x);

/// Ky Fan distances between Z^n_T and the limit deflator, per index.
std::vector<std::pair<int, double>> fatou_check(const MarketSequence& seq);

}  // namespace umlab

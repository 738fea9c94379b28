#pragma once

#include "umlab/market.hpp"
#include "umlab/preferences.hpp"
#include "umlab/stats.hpp"
#include "umlab/types.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace umlab {

/// The budget map stays on one side of the target for every multiplier
/// within the bracket expansion limits.
class BudgetInfeasibleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A Monte Carlo expectation came out non-finite; carries the partial
/// sums observed while accumulating, so the failure is diagnosable
/// rather than silent.
class NonIntegrableError : public std::runtime_error {
  public:
    NonIntegrableError(const std::string& what, std::vector<double> partial_means)
        : std::runtime_error(what), partial_means_(std::move(partial_means)) {}
    const std::vector<double>& partial_means() const { return partial_means_; }

  private:
    std::vector<double> partial_means_;
};

/// Complete-market utility maximization posed on terminal deflator samples.
struct CompleteMarketProblem {
    Vec z;          // terminal deflator per path, strictly positive
    UtilityPair u;
    double x;       // initial wealth > 0

    CompleteMarketProblem(Vec z_samples, UtilityPair utility, double initial_wealth);
};

struct SolveOptions {
    double budget_tol_rel = 1e-8;  // |E[Z X] - x| < tol * x
    int max_iterations = 200;
};

struct Solution {
    double y = 0.0;          // Lagrange multiplier
    MCStat primal;           // mean U(X_T)
    MCStat dual;             // mean V(y Z_T)
    Vec wealth;              // optimal terminal wealth per path
    double budget_residual = 0.0;
    int iterations = 0;
};

/// Mean of V(y Z_T) with its standard error.
MCStat dual_value(const Vec& z, const UtilityPair& u, double y);

/// Solves mean[Z I(y Z)] = x for y by bracketed bisection on the
/// strictly decreasing budget map, then sets X = I(y Z) = -V'(y Z).
Solution solve_complete(const CompleteMarketProblem& p, const SolveOptions& opt = {});

/// max over the y-grid of | v(y) - max over the x-grid of (u(x) - x y) |.
double conjugacy_gap(const Vec& x_grid, const Vec& u_values, const Vec& y_grid,
                     const Vec& v_values);

/// A parametric integrand against the independent second driver; the
/// resulting exponential E(nu . W)_T is the orthogonal factor of a dual
/// element Z * E(nu . W).  Candidates whose exponential does not stay
/// above `floor` on every path are rejected from the search.
struct DualCandidate {
    RiskProcess nu;
    double floor = 0.0;
    std::string label;

    static DualCandidate zero();
    static DualCandidate constant(double value);
};

/// Terminal values of the orthogonal exponential E(nu . W)_T.
Vec orthogonal_exponential_terminal(const RiskProcess& nu, const PathEnsemble& ens);
/// Full paths of E(nu . W).
Mat orthogonal_exponential(const RiskProcess& nu, const PathEnsemble& ens);

struct DualSearchResult {
    std::size_t best_index = 0;
    MCStat best_value;
    std::vector<MCStat> values;    // one per candidate; NaN if rejected
    std::vector<bool> retained;
};

/// Restricted dual infimum over a parametric family of orthogonal
/// exponentials: argmin of mean[V(y Z E(nu.W)_T)].  The family must
/// contain the zero candidate, so the result never exceeds
/// dual_value(z, u, y); the value is an upper bound on the true dual
/// value function (the search space is a sub-family of the dual domain).
DualSearchResult incomplete_dual_search(const Vec& z, const PathEnsemble& ens,
                                        const std::vector<DualCandidate>& family,
                                        const UtilityPair& u, double y);

struct CheckpointPair {
    Index s = 0, t = 0;
    MCStat mean_s, mean_t;
    double slack = 0.0;  // mean_s - mean_t + 3 * SE(paired difference)
    bool pass = false;
};

struct SupermartingaleVerdict {
    bool pass = false;
    std::vector<CheckpointPair> pairs;
};

/// Checks mean[Y_t X_t] <= mean[Y_s X_s] + 3 paired standard errors for
/// every checkpoint pair s < t on a coarse subset of the grid.
SupermartingaleVerdict dual_supermartingale_check(const Mat& y_paths, const Mat& x_paths,
                                                  Index n_checkpoints = 5);

}  // namespace umlab

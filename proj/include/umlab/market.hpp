#pragma once

#include "umlab/grid.hpp"
#include "umlab/types.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace umlab {

/// Raised when a per-path transform produces a non-finite value.
class SimOverflowError : public std::runtime_error {
  public:
    SimOverflowError(const std::string& what, Index path) : std::runtime_error(what), path_(path) {}
    Index path() const { return path_; }

  private:
    Index path_;
};

/// Market price of risk.  Deterministic kinds evaluate pathwise on the
/// grid; the state rule is evaluated at interval left endpoints (the
/// discrete form of predictability); the terminal-density kind carries
/// the instability construction, whose integrand is only known through
/// the terminal deflator value it generates.
class RiskProcess {
  public:
    enum class Kind { Constant, TimePoly, StateRule, TerminalDensity };
    using StateRuleFn = std::function<double(double t, double m)>;

    /// Defaults to the zero process (the driftless market).
    RiskProcess() : coeffs_(Vec::Zero(1)), label_("constant") {}

    static RiskProcess constant(double value);
    /// lambda(t) = coeffs[0] + coeffs[1] t + coeffs[2] t^2 + ...
    static RiskProcess time_poly(Vec coeffs);
    static RiskProcess state_rule(StateRuleFn rule, std::string label = "state_rule");
    /// Market implied by the terminal density Z_T = c_n f^n(B_T); see case_studies.
    static RiskProcess counterexample(int n);

    Kind kind() const { return kind_; }
    bool path_evaluable() const { return kind_ != Kind::TerminalDensity; }
    bool deterministic() const { return kind_ == Kind::Constant || kind_ == Kind::TimePoly; }

    /// Value at time t given driver level m (left-endpoint evaluation).
    double at(double t, double m) const;
    /// Deterministic kinds only.
    double at(double t) const;

    const Vec& coeffs() const { return coeffs_; }
    int counterexample_index() const { return ce_n_; }
    const std::string& label() const { return label_; }

  private:
    Kind kind_ = Kind::Constant;
    Vec coeffs_;
    StateRuleFn rule_;
    int ce_n_ = 0;
    std::string label_;
};

/// One realization of the driver on the grid.
struct DriverPath {
    Vec m_values;       // driver at grid points, starts at 0
    Vec qv_increments;  // quadratic-variation increment per interval
};

/// Coupled Monte Carlo realizations of the driver M (and optionally an
/// independent second driver W) on a shared grid.  Columns are grid
/// points, rows are paths; immutable after construction.
struct PathEnsemble {
    TimeGrid grid;
    Mat m;    // n_paths x n_points
    Vec qv;   // per-interval <M> increments, shared by all paths
    Mat w;    // second driver, empty unless requested
    std::uint64_t seed = 0;

    Index n_paths() const { return m.rows(); }
    bool has_second_driver() const { return w.size() > 0; }
    DriverPath path(Index i) const;

    /// Terminal driver values M_T.
    Vec terminal() const { return m.col(m.cols() - 1); }
};

/// Brownian driver: increments N(0, dt), qv increments exactly dt.
/// Identical (seed, n_paths, grid) inputs give bit-identical ensembles;
/// the second driver uses a disjoint counter stream.
PathEnsemble simulate_driver(const TimeGrid& grid, Index n_paths, std::uint64_t seed,
                             bool with_second_driver = false);

/// Terminal state-price deflator Z_T per path.  Exponential-Euler for
/// path-evaluable kinds, terminal density for the counterexample kind.
Vec deflator_terminal(const RiskProcess& lambda, const PathEnsemble& ens);

/// Full deflator paths (n_paths x n_points); Z_0 = 1, strictly positive.
Mat stochastic_exponential(const RiskProcess& lambda, const PathEnsemble& ens);

enum class AssetForm { Additive, Multiplicative };

struct AssetPaths {
    Mat s;
    BoolVec negative;  // additive form may dip below zero; flagged, not an error
};

AssetPaths asset_path(const RiskProcess& lambda, const PathEnsemble& ens, AssetForm form);

/// Predictable trading strategy: asset holding chosen at the left
/// endpoint of each interval from the state visible there.
using Strategy = std::function<double(Index step, double t, double s, double x, double m)>;

struct WealthPaths {
    Mat x;
    BoolVec admissible;  // X >= 0 at every grid point
};

WealthPaths wealth_path(const Strategy& strategy, const RiskProcess& lambda,
                        const PathEnsemble& ens, double initial_wealth, AssetForm form);

/// E int_0^T lambda^2 d<M>:  exact for constant and polynomial-in-time
/// kinds, Monte Carlo otherwise.
double l2_mu_m_norm(const RiskProcess& lambda, const PathEnsemble& ens);

/// || lambda_a - lambda_b || in L^2(mu^M); exact when both sides are
/// deterministic, Monte Carlo otherwise.  Terminal-density kinds are not
/// path-evaluable and are rejected here.
double l2_mu_m_distance(const RiskProcess& a, const RiskProcess& b, const PathEnsemble& ens);

/// Ky Fan functional of sup_t |lambda_a - lambda_b| over the grid.
double ucp_distance(const RiskProcess& a, const RiskProcess& b, const PathEnsemble& ens);

}  // namespace umlab

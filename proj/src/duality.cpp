#include "umlab/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace umlab {

namespace {

// Mean that surfaces non-finite accumulation as NonIntegrableError with
// quarter partial means attached, instead of returning silent garbage.
MCStat checked_mean(const Vec& v, const char* what) {
    std::vector<double> partial;
    const Index n = v.size();
    for (int q = 1; q <= 4; ++q) {
        const Index upto = (n * q) / 4;
        if (upto > 0) partial.push_back(pairwise_sum(v.data(), upto) / static_cast<double>(upto));
    }
    if (partial.empty() || !std::isfinite(partial.back())) {
        throw NonIntegrableError(std::string(what) + ": expectation diverged numerically",
                                 std::move(partial));
    }
    return mc_mean(v);
}

}  // namespace

CompleteMarketProblem::CompleteMarketProblem(Vec z_samples, UtilityPair utility,
                                             double initial_wealth)
    : z(std::move(z_samples)), u(std::move(utility)), x(initial_wealth) {
    if (z.size() == 0) throw std::invalid_argument("CompleteMarketProblem: no deflator samples");
    if (!(x > 0.0)) throw std::invalid_argument("CompleteMarketProblem: x must be positive");
    for (Index i = 0; i < z.size(); ++i) {
        if (!(z[i] > 0.0) || !std::isfinite(z[i]))
            throw std::invalid_argument("CompleteMarketProblem: deflator samples must be positive");
    }
    const MCStat m = mc_mean(z);
    if (m.value > 1.0 + m.band())
        throw std::invalid_argument(
            "CompleteMarketProblem: deflator mean exceeds 1 beyond 3 standard errors");
}

MCStat dual_value(const Vec& z, const UtilityPair& u, double y) {
    if (!(y > 0.0)) throw std::invalid_argument("dual_value: y must be positive");
    return checked_mean(u.V(Vec(y * z)), "dual_value");
}

namespace {

double budget(const CompleteMarketProblem& p, double y) {
    Vec zi = p.z * p.u.I(Vec(y * p.z));
    return checked_mean(zi, "budget map").value;
}

}  // namespace

Solution solve_complete(const CompleteMarketProblem& p, const SolveOptions& opt) {
    const double tol = opt.budget_tol_rel * p.x;

    double lo = p.u.U_prime(p.x);  // starting guess for the bracket
    double hi = lo;
    double b_lo = budget(p, lo);
    double b_hi = b_lo;
    int iterations = 0;

    // the budget map is strictly decreasing: expand geometrically until
    // budget(lo) >= x >= budget(hi)
    constexpr int kMaxExpand = 200;
    for (int i = 0; b_lo < p.x; ++i) {
        if (i >= kMaxExpand)
            throw BudgetInfeasibleError(
                "solve_complete: budget map stays below x down to the bracket limit");
        hi = lo;
        b_hi = b_lo;
        lo *= 0.5;
        b_lo = budget(p, lo);
        ++iterations;
    }
    for (int i = 0; b_hi > p.x; ++i) {
        if (i >= kMaxExpand)
            throw BudgetInfeasibleError(
                "solve_complete: budget map stays above x up to the bracket limit");
        lo = hi;
        b_lo = b_hi;
        hi *= 2.0;
        b_hi = budget(p, hi);
        ++iterations;
    }
    if (!(b_lo >= b_hi))
        throw std::logic_error("solve_complete: budget map is not decreasing on the bracket");

    double y = hi;
    double res = b_hi - p.x;
    if (std::abs(b_lo - p.x) < std::abs(res)) {
        y = lo;
        res = b_lo - p.x;
    }
    while (std::abs(res) > tol && iterations < opt.max_iterations && (hi - lo) > 1e-16 * hi) {
        const double mid = 0.5 * (lo + hi);
        const double b_mid = budget(p, mid);
        ++iterations;
        if (!(b_lo >= b_mid && b_mid >= b_hi))
            throw std::logic_error("solve_complete: budget map is not decreasing on the bracket");
        if (std::abs(b_mid - p.x) < std::abs(res)) {
            y = mid;
            res = b_mid - p.x;
        }
        if (b_mid > p.x) {
            lo = mid;
            b_lo = b_mid;
        } else {
            hi = mid;
            b_hi = b_mid;
        }
    }

    Solution sol;
    sol.y = y;
    sol.iterations = iterations;
    sol.wealth = p.u.I(Vec(y * p.z));
    sol.primal = checked_mean(p.u.U(sol.wealth), "primal value");
    sol.dual = dual_value(p.z, p.u, y);
    sol.budget_residual = std::abs(res);
    return sol;
}

double conjugacy_gap(const Vec& x_grid, const Vec& u_values, const Vec& y_grid,
                     const Vec& v_values) {
    if (x_grid.size() != u_values.size() || y_grid.size() != v_values.size())
        throw std::invalid_argument("conjugacy_gap: grid/value size mismatch");
    if (x_grid.size() == 0 || y_grid.size() == 0)
        throw std::invalid_argument("conjugacy_gap: empty grid");
    double gap = 0.0;
    for (Index j = 0; j < y_grid.size(); ++j) {
        const double inner = (u_values - x_grid * y_grid[j]).maxCoeff();
        gap = std::max(gap, std::abs(v_values[j] - inner));
    }
    return gap;
}

DualCandidate DualCandidate::zero() { return constant(0.0); }

DualCandidate DualCandidate::constant(double value) {
    DualCandidate c;
    c.nu = RiskProcess::constant(value);
    c.label = "nu=" + std::to_string(value);
    return c;
}

namespace {

Vec orthogonal_log_exponential(const RiskProcess& nu, const PathEnsemble& ens) {
    if (!ens.has_second_driver())
        throw std::invalid_argument("orthogonal exponential: ensemble has no second driver");
    if (!nu.deterministic())
        throw std::invalid_argument(
            "orthogonal exponential: integrand must be constant or deterministic in time");
    Vec acc = Vec::Zero(ens.n_paths());
    for (Index k = 0; k < ens.grid.n_steps(); ++k) {
        const double v = nu.at(ens.grid.t(k));
        acc += v * (ens.w.col(k + 1) - ens.w.col(k)) - 0.5 * v * v * ens.qv[k];
    }
    return acc;
}

}  // namespace

Vec orthogonal_exponential_terminal(const RiskProcess& nu, const PathEnsemble& ens) {
    Vec acc = orthogonal_log_exponential(nu, ens);
    for (Index i = 0; i < acc.size(); ++i) {
        if (!(std::abs(acc[i]) <= 700.0))
            throw SimOverflowError("orthogonal exponential overflow", i);
    }
    return acc.exp();
}

Mat orthogonal_exponential(const RiskProcess& nu, const PathEnsemble& ens) {
    if (!ens.has_second_driver())
        throw std::invalid_argument("orthogonal exponential: ensemble has no second driver");
    if (!nu.deterministic())
        throw std::invalid_argument(
            "orthogonal exponential: integrand must be constant or deterministic in time");
    Mat e(ens.n_paths(), ens.grid.n_points());
    e.col(0).setOnes();
    Vec acc = Vec::Zero(ens.n_paths());
    for (Index k = 0; k < ens.grid.n_steps(); ++k) {
        const double v = nu.at(ens.grid.t(k));
        acc += v * (ens.w.col(k + 1) - ens.w.col(k)) - 0.5 * v * v * ens.qv[k];
        e.col(k + 1) = acc.exp();
    }
    return e;
}

DualSearchResult incomplete_dual_search(const Vec& z, const PathEnsemble& ens,
                                        const std::vector<DualCandidate>& family,
                                        const UtilityPair& u, double y) {
    if (family.empty()) throw std::invalid_argument("incomplete_dual_search: empty family");
    if (!(y > 0.0)) throw std::invalid_argument("incomplete_dual_search: y must be positive");
    const bool has_zero = std::any_of(family.begin(), family.end(), [](const DualCandidate& c) {
        return c.nu.kind() == RiskProcess::Kind::Constant && c.nu.coeffs()[0] == 0.0;
    });
    if (!has_zero)
        throw std::invalid_argument("incomplete_dual_search: family must contain the zero candidate");

    DualSearchResult out;
    out.values.reserve(family.size());
    out.retained.reserve(family.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < family.size(); ++j) {
        const DualCandidate& cand = family[j];
        Vec e = orthogonal_exponential_terminal(cand.nu, ens);
        if ((e <= cand.floor).any()) {
            out.values.push_back(MCStat{std::numeric_limits<double>::quiet_NaN(),
                                        std::numeric_limits<double>::quiet_NaN(), 0});
            out.retained.push_back(false);
            continue;
        }
        const MCStat v = checked_mean(u.V(Vec(y * z * e)), "incomplete_dual_search");
        out.values.push_back(v);
        out.retained.push_back(true);
        if (v.value < best) {
            best = v.value;
            out.best_index = j;
            out.best_value = v;
        }
    }
    if (!std::isfinite(best))
        throw std::runtime_error("incomplete_dual_search: every candidate was rejected");
    return out;
}

SupermartingaleVerdict dual_supermartingale_check(const Mat& y_paths, const Mat& x_paths,
                                                  Index n_checkpoints) {
    if (y_paths.rows() != x_paths.rows() || y_paths.cols() != x_paths.cols())
        throw std::invalid_argument("dual_supermartingale_check: path shape mismatch");
    if (n_checkpoints < 2) throw std::invalid_argument("dual_supermartingale_check: need >= 2 checkpoints");
    const Index last = y_paths.cols() - 1;
    std::vector<Index> idx;
    for (Index j = 0; j < n_checkpoints; ++j) {
        Index k = (last * j) / (n_checkpoints - 1);
        if (idx.empty() || k > idx.back()) idx.push_back(k);
    }

    SupermartingaleVerdict verdict;
    verdict.pass = true;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            CheckpointPair pair;
            pair.s = idx[a];
            pair.t = idx[b];
            Vec prod_s = y_paths.col(pair.s) * x_paths.col(pair.s);
            Vec prod_t = y_paths.col(pair.t) * x_paths.col(pair.t);
            pair.mean_s = mc_mean(prod_s);
            pair.mean_t = mc_mean(prod_t);
            const MCStat diff = mc_mean_diff(prod_t, prod_s);
            pair.slack = -diff.value + diff.band();
            pair.pass = diff.value <= diff.band();
            verdict.pass = verdict.pass && pair.pass;
            verdict.pairs.push_back(pair);
        }
    }
    return verdict;
}

}  // namespace umlab

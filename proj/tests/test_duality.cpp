#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "umlab/duality.hpp"
#include "umlab/market.hpp"
#include "umlab/stability.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>

using namespace umlab;

namespace {

// Gauss-Hermite oracle for E[f(xi)], xi ~ N(0,1): Golub-Welsch nodes and
// weights from the Jacobi matrix of the (physicists') Hermite recurrence.
double gauss_hermite_expect(const std::function<double(double)>& f, int n_nodes = 60) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
    for (int k = 1; k < n_nodes; ++k) {
        const double off = std::sqrt(k / 2.0);
        jacobi(k, k - 1) = off;
        jacobi(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    double acc = 0.0;
    for (int i = 0; i < n_nodes; ++i) {
        const double weight = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
        acc += weight * f(std::sqrt(2.0) * es.eigenvalues()[i]);
    }
    return acc;
}

// E[Z_T^a] for Z = exp(-lam M_T - lam^2 T / 2) by quadrature.
double lognormal_moment(double lam, double horizon, double a) {
    const double s = lam * std::sqrt(horizon);
    return gauss_hermite_expect(
        [&](double xi) { return std::exp(a * (-s * xi - 0.5 * lam * lam * horizon)); });
}

Vec lognormal_deflator(double lam, double horizon, Index n, std::uint64_t seed, Index steps = 64) {
    const PathEnsemble ens = simulate_driver(TimeGrid::uniform(horizon, steps), n, seed);
    return deflator_terminal(RiskProcess::constant(lam), ens);
}

}  // namespace

TEST_CASE("gauss-hermite oracle reproduces lognormal moments") {
    // E[Z^a] = exp(a (a - 1) lam^2 T / 2)
    for (double a : {-3.0, -1.0, 0.5, 1.0, 2.0}) {
        const double exact = std::exp(0.5 * a * (a - 1.0) * 0.04);
        CHECK(lognormal_moment(0.2, 1.0, a) == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("problem validation") {
    Vec z = Vec::Constant(100, 1.0);
    CHECK_THROWS_AS(CompleteMarketProblem(Vec(), make_log(), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CompleteMarketProblem(z, make_log(), 0.0), std::invalid_argument);
    Vec bad = z;
    bad[3] = -0.5;
    CHECK_THROWS_AS(CompleteMarketProblem(bad, make_log(), 1.0), std::invalid_argument);
    Vec big = Vec::Constant(100, 1.5);  // supermartingale sanity: mean > 1
    CHECK_THROWS_AS(CompleteMarketProblem(big, make_log(), 1.0), std::invalid_argument);
}

TEST_CASE("log investor is myopic: y = 1/x and X = x/Z") {
    const Vec z = lognormal_deflator(0.2, 1.0, 20000, 7);
    const Solution sol = solve_complete(CompleteMarketProblem(z, make_log(), 1.0));
    CHECK(std::abs(sol.y - 1.0) < 2e-8);
    CHECK(((sol.wealth * z - 1.0).abs() < 1e-7).all());
    CHECK(sol.budget_residual < 1e-8);

    const Solution sol3 = solve_complete(CompleteMarketProblem(z, make_log(), 3.0));
    CHECK(std::abs(sol3.y - 1.0 / 3.0) < 2e-8 / 3.0);
}

TEST_CASE("degenerate deflator, power 1/2: y = 1, X = 1, u = 2") {
    const Vec z = Vec::Constant(5000, 1.0);
    const Solution sol = solve_complete(CompleteMarketProblem(z, make_power(0.5), 1.0));
    CHECK(sol.y == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(((sol.wealth - 1.0).abs() < 1e-9).all());
    CHECK(sol.primal.value == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("merton market, power 1/2: multiplier matches the quadrature oracle") {
    const double lam = 0.2, x = 1.0, gamma = 0.5;
    const Vec z = lognormal_deflator(lam, 1.0, 40000, 11);
    const UtilityPair u = make_power(gamma);
    const Solution sol = solve_complete(CompleteMarketProblem(z, u, x));

    // multiplier from the budget constraint: y = (E[Z^(g/(g-1))]/x)^(1-g)
    const double moment = lognormal_moment(lam, 1.0, gamma / (gamma - 1.0));
    const double y_oracle = std::pow(moment / x, 1.0 - gamma);
    CHECK(y_oracle == doctest::Approx(std::exp(0.02)).epsilon(1e-10));

    // sampled budget at the oracle multiplier is within 3 SE of x
    Vec budget_samples = z * u.I(Vec(y_oracle * z));
    const MCStat b = mc_mean(budget_samples);
    CHECK(std::abs(b.value - x) <= b.band());

    // and the solved multiplier equals the closed form of the *empirical*
    // measure to solver tolerance
    const double y_emp = std::pow(mc_mean(Vec(z.pow(gamma / (gamma - 1.0)))).value / x, 1.0 - gamma);
    CHECK(sol.y == doctest::Approx(y_emp).epsilon(1e-6));
}

TEST_CASE("first-order condition and weak duality hold per solve") {
    const Vec z = lognormal_deflator(0.25, 1.0, 10000, 13);
    for (const UtilityPair& u : {make_log(), make_power(0.5), make_power(-1.0)}) {
        for (double x : {0.5, 1.0, 2.5}) {
            const Solution sol = solve_complete(CompleteMarketProblem(z, u, x));
            // U'(X) = y Z exactly by construction
            const Vec lhs = u.U_prime(sol.wealth);
            const Vec rhs = sol.y * z;
            CHECK(((lhs - rhs).abs() <= 1e-10 * rhs).all());
            CHECK(sol.budget_residual <= 1e-8 * x);
            // weak duality with 3 combined standard errors
            const double slack = sol.dual.value + x * sol.y - sol.primal.value;
            CHECK(slack >= -3.0 * std::hypot(sol.dual.se, sol.primal.se));
        }
    }
}

TEST_CASE("power-utility scale property") {
    const Vec z = lognormal_deflator(0.2, 1.0, 8000, 17);
    for (double gamma : {0.5, -1.0}) {
        const UtilityPair u = make_power(gamma);
        const Solution base = solve_complete(CompleteMarketProblem(z, u, 1.0));
        const double c = 3.7;
        const Solution scaled = solve_complete(CompleteMarketProblem(z, u, c));
        CHECK(scaled.y == doctest::Approx(base.y * std::pow(c, gamma - 1.0)).epsilon(1e-6));
        CHECK(((scaled.wealth - c * base.wealth).abs() <= 1e-5 * scaled.wealth).all());
    }
}

TEST_CASE("budget infeasibility is reported") {
    // inverse marginal capped at 2: no multiplier can finance x = 10
    const UtilityPair capped(
        "capped", UtilityPair::Kind::Custom, [](double x) { return std::log(x); },
        [](double x) { return 1.0 / x; },
        [](double y) { return std::min(1.0 / y, 2.0); },
        [](double y) { return -std::log(y) - 1.0; }, [](double y) { return -1.0 / y; });
    const Vec z = Vec::Constant(1000, 1.0);
    CHECK_THROWS_AS(solve_complete(CompleteMarketProblem(z, capped, 10.0)),
                    BudgetInfeasibleError);
}

TEST_CASE("non-integrable dual surfaces as an error with diagnostics") {
    Vec z = Vec::Constant(1000, 1.0);
    z[17] = 1e-300;  // heavy left tail; I(yz) = (yz)^-10 overflows
    bool threw = false;
    try {
        solve_complete(CompleteMarketProblem(z, make_power(0.9), 1.0));
    } catch (const NonIntegrableError& e) {
        threw = true;
        CHECK_FALSE(e.partial_means().empty());
    }
    CHECK(threw);
}

TEST_CASE("dual value closed forms") {
    SUBCASE("log utility, degenerate deflator") {
        const Vec z = Vec::Constant(4000, 1.0);
        for (double y : {0.5, 1.0, 2.0}) {
            const MCStat v = dual_value(z, make_log(), y);
            CHECK(v.value == doctest::Approx(-std::log(y) - 1.0).epsilon(1e-12));
            CHECK(v.se < 1e-15);
        }
        CHECK_THROWS_AS(dual_value(z, make_log(), 0.0), std::invalid_argument);
    }
    SUBCASE("log utility, merton market: v(y) = -log y - 1 + lam^2 T / 2") {
        const Vec z = lognormal_deflator(0.2, 1.0, 40000, 19);
        const MCStat v = dual_value(z, make_log(), 0.7);
        const double expected = -std::log(0.7) - 1.0 + 0.5 * 0.04;
        CHECK(std::abs(v.value - expected) <= v.band());
    }
    SUBCASE("power -1 matches quadrature") {
        const Vec z = lognormal_deflator(0.2, 1.0, 40000, 23);
        const UtilityPair u = make_power(-1.0);
        const MCStat v = dual_value(z, u, 1.3);
        // V(y Z) = -2 sqrt(y Z)
        const double expected = -2.0 * std::sqrt(1.3) * lognormal_moment(0.2, 1.0, 0.5);
        CHECK(std::abs(v.value - expected) <= v.band());
    }
}

TEST_CASE("conjugacy gap on closed forms") {
    SUBCASE("log: u(x) = log x + h, v(y) = -log y - 1 + h") {
        const double h = 0.02;
        const Vec xs = Eigen::ArrayXd::LinSpaced(2000, std::log(1e-2), std::log(1e2)).exp();
        const Vec ys = Eigen::ArrayXd::LinSpaced(33, std::log(0.25), std::log(4.0)).exp();
        const Vec us = xs.log() + h;
        const Vec vs = -ys.log() - 1.0 + h;
        CHECK(conjugacy_gap(xs, us, ys, vs) < 1e-5);
    }
    SUBCASE("degenerate market, power 1/2: v(y) = 1/y") {
        const Vec xs = Eigen::ArrayXd::LinSpaced(4000, std::log(1e-3), std::log(1e3)).exp();
        const Vec ys = Eigen::ArrayXd::LinSpaced(20, std::log(0.5), std::log(2.0)).exp();
        const Vec us = 2.0 * xs.sqrt();
        const Vec vs = ys.inverse();
        CHECK(conjugacy_gap(xs, us, ys, vs) < 1e-5);
    }
    CHECK_THROWS_AS(conjugacy_gap(Vec::Zero(3), Vec::Zero(4), Vec::Zero(2), Vec::Zero(2)),
                    std::invalid_argument);
}

TEST_CASE("incomplete dual search") {
    const PathEnsemble ens = simulate_driver(TimeGrid::uniform(1.0, 64), 20000, 29, true);
    const Vec z = deflator_terminal(RiskProcess::constant(0.2), ens);

    SUBCASE("zero-only family returns the dual value exactly") {
        const std::vector<DualCandidate> family = {DualCandidate::zero()};
        const DualSearchResult res = incomplete_dual_search(z, ens, family, make_log(), 1.0);
        CHECK(res.best_index == 0);
        CHECK(res.best_value.value == dual_value(z, make_log(), 1.0).value);
    }
    SUBCASE("log utility: the orthogonal component only adds cost") {
        std::vector<DualCandidate> family;
        for (int i = -10; i <= 10; ++i) family.push_back(DualCandidate::constant(0.1 * i));
        const DualSearchResult res = incomplete_dual_search(z, ens, family, make_log(), 1.0);
        CHECK(family[res.best_index].nu.coeffs()[0] == 0.0);
        // independent grid oracle: E[-log E(nu W)] = int nu^2 dt / 2 >= 0
        for (std::size_t j = 0; j < family.size(); ++j) {
            CHECK(res.values[j].value >= res.best_value.value);
        }
    }
    SUBCASE("power -1, complete market: optimum at nu = 0 within grid resolution") {
        std::vector<DualCandidate> family;
        for (int i = -5; i <= 5; ++i) family.push_back(DualCandidate::constant(0.1 * i));
        const DualSearchResult res = incomplete_dual_search(z, ens, family, make_power(-1.0), 1.0);
        CHECK(std::abs(family[res.best_index].nu.coeffs()[0]) <= 0.1 + 1e-12);
        CHECK(res.best_value.value <= dual_value(z, make_power(-1.0), 1.0).value);
    }
    SUBCASE("floor rejection") {
        std::vector<DualCandidate> family = {DualCandidate::zero()};
        DualCandidate wild = DualCandidate::constant(3.0);
        wild.floor = 0.5;  // a 3-sigma move of nu W drops E(nu W) below 0.5
        family.push_back(wild);
        const DualSearchResult res = incomplete_dual_search(z, ens, family, make_log(), 1.0);
        CHECK_FALSE(res.retained[1]);
        CHECK(res.best_index == 0);
    }
    CHECK_THROWS_AS(incomplete_dual_search(z, ens, {}, make_log(), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(incomplete_dual_search(z, ens, {DualCandidate::constant(0.3)}, make_log(), 1.0),
                    std::invalid_argument);
}

TEST_CASE("supermartingale checkpoint verdicts") {
    const PathEnsemble ens = simulate_driver(TimeGrid::uniform(1.0, 64), 20000, 31, true);
    const RiskProcess lam = RiskProcess::constant(0.2);
    const Mat z_paths = stochastic_exponential(lam, ens);

    SUBCASE("nu = 0, zero strategy: Y X = x Z passes") {
        const WealthPaths w =
            wealth_path([](Index, double, double, double, double) { return 0.0; }, lam, ens, 1.0,
                        AssetForm::Multiplicative);
        const SupermartingaleVerdict v = dual_supermartingale_check(z_paths, w.x);
        CHECK(v.pass);
        CHECK(v.pairs.size() == 10);  // 5 checkpoints, all ordered pairs
    }
    SUBCASE("nu = 0, log-optimal wealth: Y X is a martingale, passes") {
        auto log_optimal = [](Index, double, double s, double x, double) { return 0.2 * x / s; };
        const WealthPaths w = wealth_path(log_optimal, lam, ens, 1.0, AssetForm::Multiplicative);
        const SupermartingaleVerdict v = dual_supermartingale_check(z_paths, w.x);
        CHECK(v.pass);
    }
    SUBCASE("nu = 0.3 orthogonal factor, zero strategy: passes") {
        const Mat y_paths = z_paths * orthogonal_exponential(RiskProcess::constant(0.3), ens);
        const WealthPaths w =
            wealth_path([](Index, double, double, double, double) { return 0.0; }, lam, ens, 1.0,
                        AssetForm::Multiplicative);
        const SupermartingaleVerdict v = dual_supermartingale_check(y_paths, w.x);
        CHECK(v.pass);
    }
    SUBCASE("a growing product is rejected") {
        const Mat ones = Mat::Constant(100, 65, 1.0);
        Mat growing(100, 65);
        for (Index k = 0; k < 65; ++k) growing.col(k).setConstant(1.0 + 0.1 * k);
        const SupermartingaleVerdict v = dual_supermartingale_check(growing, ones);
        CHECK_FALSE(v.pass);
    }
}

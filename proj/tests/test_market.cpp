#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "umlab/market.hpp"
#include "umlab/stats.hpp"

#include <cmath>

using namespace umlab;

TEST_CASE("time grid validation") {
    CHECK_THROWS_AS(TimeGrid::uniform(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid::uniform(-1.0, 4), std::invalid_argument);
    Vec bad1(1);
    bad1 << 0.0;
    CHECK_THROWS_AS(TimeGrid{bad1}, std::invalid_argument);
    Vec bad2(3);
    bad2 << 0.1, 0.5, 1.0;
    CHECK_THROWS_AS(TimeGrid{bad2}, std::invalid_argument);
    Vec bad3(3);
    bad3 << 0.0, 0.5, 0.5;
    CHECK_THROWS_AS(TimeGrid{bad3}, std::invalid_argument);

    const TimeGrid g = TimeGrid::uniform(2.0, 4);
    CHECK(g.n_steps() == 4);
    CHECK(g.horizon() == 2.0);
    CHECK(g.dt(1) == doctest::Approx(0.5));
}

TEST_CASE("single-step driver is standard normal") {
    const TimeGrid g = TimeGrid::uniform(1.0, 1);
    const Index n = 1000000;
    const PathEnsemble ens = simulate_driver(g, n, 2024);
    CHECK(ens.qv[0] == 1.0);
    CHECK((ens.m.col(0) == 0.0).all());
    const MCStat m = mc_mean(ens.terminal());
    CHECK(std::abs(m.value) <= 3.0 / std::sqrt(static_cast<double>(n)));
    const double var = (ens.terminal() - m.value).square().sum() / static_cast<double>(n - 1);
    CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("same seed reproduces bit-identical ensembles") {
    const TimeGrid g = TimeGrid::uniform(1.0, 16);
    const PathEnsemble a = simulate_driver(g, 500, 99, true);
    const PathEnsemble b = simulate_driver(g, 500, 99, true);
    CHECK((a.m == b.m).all());
    CHECK((a.w == b.w).all());
    const PathEnsemble c = simulate_driver(g, 500, 100, true);
    CHECK_FALSE((a.m == c.m).all());
}

TEST_CASE("second driver is independent of the first") {
    const TimeGrid g = TimeGrid::uniform(1.0, 8);
    const Index n = 100000;
    const PathEnsemble ens = simulate_driver(g, n, 5, true);
    REQUIRE(ens.has_second_driver());
    const Vec mt = ens.m.col(8);
    const Vec wt = ens.w.col(8);
    const double corr = ((mt - mc_mean(mt).value) * (wt - mc_mean(wt).value)).mean();
    CHECK(std::abs(corr) <= 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("driver path view") {
    const TimeGrid g = TimeGrid::uniform(1.0, 4);
    const PathEnsemble ens = simulate_driver(g, 10, 7);
    const DriverPath p = ens.path(3);
    CHECK(p.m_values.size() == 5);
    CHECK(p.m_values[0] == 0.0);
    CHECK(p.m_values[4] == ens.m(3, 4));
    CHECK((p.qv_increments == ens.qv).all());
    CHECK((p.qv_increments >= 0.0).all());
    CHECK_THROWS_AS(simulate_driver(g, 0, 7), std::invalid_argument);
}

TEST_CASE("stochastic exponential: zero risk gives Z = 1") {
    const PathEnsemble ens = simulate_driver(TimeGrid::uniform(1.0, 32), 200, 11);
    const Mat z = stochastic_exponential(RiskProcess::constant(0.0), ens);
    CHECK((z == 1.0).all());
    CHECK((deflator_terminal(RiskProcess::constant(0.0), ens) == 1.0).all());
}

TEST_CASE("stochastic exponential: martingale property at desk scale") {
    const PathEnsemble ens = simulate_driver(TimeGrid::uniform(1.0, 64), 40000, 21);
    const Vec z = deflator_terminal(RiskProcess::constant(0.2), ens);
    CHECK((z > 0.0).all());
    const MCStat m = mc_mean(z);
    CHECK(std::abs(m.value - 1.0) <= m.band());
}

TEST_CASE("exponential-Euler log identity holds to machine precision") {
    const PathEnsemble ens = simulate_driver(TimeGrid::uniform(2.0, 37), 50, 31);
    Vec coeffs(2);
    coeffs << 0.1, 0.3;  // lambda(t) = 0.1 + 0.3 t
    const RiskProcess lam = RiskProcess::time_poly(coeffs);
    const Mat z = stochastic_exponential(lam, ens);

    for (Index i = 0; i < ens.n_paths(); ++i) {
        double acc = 0.0;
        for (Index k = 0; k < ens.grid.n_steps(); ++k) {
            const double l = lam.at(ens.grid.t(k));
            acc += l * (ens.m(i, k + 1) - ens.m(i, k)) + 0.5 * l * l * ens.qv[k];
        }
        CHECK(std::abs(std::log(z(i, ens.grid.n_steps())) + acc) < 1e-13);
    }
}

TEST_CASE("stochastic exponential overflow reports the path") {
    const PathEnsemble ens = simulate_driver(TimeGrid::uniform(1.0, 4), 50, 3);
    try {
        stochastic_exponential(RiskProcess::constant(1e9), ens);
        FAIL("expected SimOverflowError");
    } catch (const SimOverflowError& e) {
        CHECK(e.path() >= 0);
        CHECK(e.path() < 50);
    }
}

TEST_CASE("asset paths") {
    const PathEnsemble ens = simulate_driver(TimeGrid::uniform(1.0, 32), 5000, 17);

    SUBCASE("additive with zero risk is 1 + M") {
        const AssetPaths a = asset_path(RiskProcess::constant(0.0), ens, AssetForm::Additive);
        CHECK(((a.s - (1.0 + ens.m)).abs() < 1e-14).all());
    }
    SUBCASE("additive negativity is flagged on long horizons") {
        const PathEnsemble longens = simulate_driver(TimeGrid::uniform(9.0, 64), 500, 19);
        const AssetPaths a = asset_path(RiskProcess::constant(0.0), longens, AssetForm::Additive);
        CHECK(a.negative.any());
        // flag matches the actual path minimum
        for (Index i = 0; i < 500; ++i) {
            CHECK(a.negative[i] == (a.s.row(i).minCoeff() < 0.0));
        }
    }
    SUBCASE("multiplicative is positive with lognormal terminal mean") {
        const AssetPaths a = asset_path(RiskProcess::constant(0.2), ens, AssetForm::Multiplicative);
        CHECK((a.s > 0.0).all());
        CHECK_FALSE(a.negative.any());
        // E[S_T] = exp(lambda T) for constant lambda and sigma = 1
        const MCStat m = mc_mean(a.s.col(32));
        CHECK(std::abs(m.value - std::exp(0.2)) <= m.band());
    }
}

TEST_CASE("wealth paths") {
    const PathEnsemble ens = simulate_driver(TimeGrid::uniform(1.0, 64), 2000, 23);

    SUBCASE("zero strategy keeps wealth constant and admissible") {
        const WealthPaths w = wealth_path([](Index, double, double, double, double) { return 0.0; },
                                          RiskProcess::constant(0.2), ens, 1.5,
                                          AssetForm::Multiplicative);
        CHECK((w.x == 1.5).all());
        CHECK(w.admissible.all());
    }
    SUBCASE("unit holding in the additive driftless market is x + M") {
        const WealthPaths w = wealth_path([](Index, double, double, double, double) { return 1.0; },
                                          RiskProcess::constant(0.0), ens, 2.0,
                                          AssetForm::Additive);
        CHECK(((w.x - (2.0 + ens.m)).abs() < 1e-12).all());
    }
    SUBCASE("log-optimal fraction tracks x / Z with O(dt) error") {
        const double lam = 0.2;
        auto log_optimal = [lam](Index, double, double s, double x, double) {
            return lam * x / s;
        };
        double prev_err = 0.0;
        for (Index steps : {64, 128}) {
            const PathEnsemble e = simulate_driver(TimeGrid::uniform(1.0, steps), 2000, 29);
            const WealthPaths w = wealth_path(log_optimal, RiskProcess::constant(lam), e, 1.0,
                                              AssetForm::Multiplicative);
            const Vec target = deflator_terminal(RiskProcess::constant(lam), e).inverse();
            const double err = (w.x.col(steps) - target).abs().mean();
            if (steps == 64) {
                prev_err = err;
                CHECK(err < 0.05);  // already small at coarse resolution
            } else {
                CHECK(err < 0.8 * prev_err);  // shrinks roughly linearly in dt
            }
        }
    }
    CHECK_THROWS_AS(wealth_path([](Index, double, double, double, double) { return 0.0; },
                                RiskProcess::constant(0.0), ens, -1.0, AssetForm::Additive),
                    std::invalid_argument);
}

TEST_CASE("L2(mu^M) norm") {
    const PathEnsemble ens = simulate_driver(TimeGrid::uniform(1.0, 256), 4000, 37);
    CHECK(l2_mu_m_norm(RiskProcess::constant(0.0), ens) == 0.0);
    CHECK(l2_mu_m_norm(RiskProcess::constant(0.2), ens) == doctest::Approx(0.04).epsilon(1e-15));

    Vec ramp(2);
    ramp << 0.0, 1.0;  // lambda(t) = t
    CHECK(l2_mu_m_norm(RiskProcess::time_poly(ramp), ens) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    // the Monte Carlo route differs from the exact integral only by the
    // left-endpoint Riemann gap, at most sup|d(lambda^2)/dt| * dt / 2
    const RiskProcess as_rule = RiskProcess::state_rule([](double t, double) { return t; });
    const double mc = l2_mu_m_norm(as_rule, ens);
    CHECK(std::abs(mc - 1.0 / 3.0) <= 0.5 * 1.05 / 256.0);

    CHECK_THROWS_AS(l2_mu_m_norm(RiskProcess::counterexample(5), ens), std::invalid_argument);
}

TEST_CASE("L2(mu^M) distance") {
    const PathEnsemble ens = simulate_driver(TimeGrid::uniform(1.0, 64), 4000, 41);
    CHECK(l2_mu_m_distance(RiskProcess::constant(0.2), RiskProcess::constant(0.3), ens) ==
          doctest::Approx(0.1).epsilon(1e-12));

    // state-rule route agrees with the closed form for deterministic rules
    const RiskProcess rule = RiskProcess::state_rule([](double t, double) { return t; });
    Vec ramp(2);
    ramp << 0.0, 1.0;
    const double d = l2_mu_m_distance(rule, RiskProcess::constant(0.0), ens);
    CHECK(d == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(0.01));
    CHECK_THROWS_AS(
        l2_mu_m_distance(RiskProcess::counterexample(3), RiskProcess::constant(0.0), ens),
        std::invalid_argument);
}

TEST_CASE("ucp distance") {
    const PathEnsemble ens = simulate_driver(TimeGrid::uniform(1.0, 32), 2000, 43);
    CHECK(ucp_distance(RiskProcess::constant(0.2), RiskProcess::constant(0.2), ens) == 0.0);
    CHECK(ucp_distance(RiskProcess::constant(0.2), RiskProcess::constant(0.3), ens) ==
          doctest::Approx(0.1).epsilon(1e-12));

    for (int n : {4, 16, 64}) {
        Vec ramp(2);
        ramp << 0.0, 1.0;
        Vec shifted(2);
        shifted << 1.0 / n, 1.0;
        const double d = ucp_distance(RiskProcess::time_poly(ramp), RiskProcess::time_poly(shifted), ens);
        CHECK(d <= 1.0 / n + 1e-12);
    }
}

TEST_CASE("predictable evaluation uses the interval left endpoint") {
    // two-step grid; a rule that jumps at t > 0 must be sampled at t = 0
    // on the first interval and at t_1 on the second
    Vec times(3);
    times << 0.0, 0.5, 1.0;
    const PathEnsemble ens = simulate_driver(TimeGrid(times), 100, 47);
    const RiskProcess rule =
        RiskProcess::state_rule([](double t, double m) { return t == 0.0 ? 0.0 : 1.0 + 0.0 * m; });
    const Vec z = deflator_terminal(rule, ens);
    // first interval contributes nothing; second uses lambda = 1
    for (Index i = 0; i < 100; ++i) {
        const double expected = std::exp(-(ens.m(i, 2) - ens.m(i, 1)) - 0.5 * ens.qv[1]);
        CHECK(z[i] == doctest::Approx(expected).epsilon(1e-13));
    }
}

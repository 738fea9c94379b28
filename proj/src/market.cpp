#include "umlab/market.hpp"

#include "umlab/case_studies.hpp"
#include "umlab/rng.hpp"
#include "umlab/stability.hpp"
#include "umlab/stats.hpp"

#include <cmath>
#include <utility>

namespace umlab {

namespace {

double poly_eval(const Vec& coeffs, double t) {
    double v = 0.0;
    for (Index i = coeffs.size() - 1; i >= 0; --i) v = v * t + coeffs[i];
    return v;
}

// Integral over [0, horizon] of the product of two polynomials.
double poly_product_integral(const Vec& a, const Vec& b, double horizon) {
    double total = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
        for (Index j = 0; j < b.size(); ++j) {
            Index k = i + j;
            total += a[i] * b[j] * std::pow(horizon, static_cast<double>(k + 1)) /
                     static_cast<double>(k + 1);
        }
    }
    return total;
}

Vec poly_diff(const Vec& a, const Vec& b) {
    Vec out = Vec::Zero(std::max(a.size(), b.size()));
    out.head(a.size()) += a;
    out.head(b.size()) -= b;
    return out;
}

// Exponentials are formed on the log scale; beyond +-700 the result
// would overflow or flush to zero (Eigen's vectorized exp silently
// clamps, so the accumulator is checked rather than the result).
void check_log_scale(const Vec& logv, const char* what) {
    for (Index i = 0; i < logv.size(); ++i) {
        if (!(std::abs(logv[i]) <= 700.0)) throw SimOverflowError(what, i);
    }
}

}  // namespace

RiskProcess RiskProcess::constant(double value) {
    RiskProcess r;
    r.kind_ = Kind::Constant;
    r.coeffs_ = Vec::Constant(1, value);
    r.label_ = "constant";
    return r;
}

RiskProcess RiskProcess::time_poly(Vec coeffs) {
    if (coeffs.size() == 0) throw std::invalid_argument("RiskProcess::time_poly: empty coefficients");
    RiskProcess r;
    r.kind_ = Kind::TimePoly;
    r.coeffs_ = std::move(coeffs);
    r.label_ = "time_poly";
    return r;
}

RiskProcess RiskProcess::state_rule(StateRuleFn rule, std::string label) {
    if (!rule) throw std::invalid_argument("RiskProcess::state_rule: empty rule");
    RiskProcess r;
    r.kind_ = Kind::StateRule;
    r.rule_ = std::move(rule);
    r.label_ = std::move(label);
    return r;
}

RiskProcess RiskProcess::counterexample(int n) {
    counterexample_params(n);  // validates n >= 2
    RiskProcess r;
    r.kind_ = Kind::TerminalDensity;
    r.ce_n_ = n;
    r.label_ = "counterexample";
    return r;
}

double RiskProcess::at(double t, double m) const {
    switch (kind_) {
        case Kind::Constant:
            return coeffs_[0];
        case Kind::TimePoly:
            return poly_eval(coeffs_, t);
        case Kind::StateRule:
            return rule_(t, m);
        case Kind::TerminalDensity:
            throw std::invalid_argument("RiskProcess: terminal-density kind is not path-evaluable");
    }
    return 0.0;
}

double RiskProcess::at(double t) const {
    if (!deterministic())
        throw std::invalid_argument("RiskProcess::at(t): kind is not deterministic");
    return at(t, 0.0);
}

DriverPath PathEnsemble::path(Index i) const {
    DriverPath p;
    p.m_values = m.row(i).transpose();
    p.qv_increments = qv;
    return p;
}

PathEnsemble simulate_driver(const TimeGrid& grid, Index n_paths, std::uint64_t seed,
                             bool with_second_driver) {
    if (n_paths < 1) throw std::invalid_argument("simulate_driver: n_paths must be positive");
    const Index n_steps = grid.n_steps();

    PathEnsemble ens{grid, Mat(n_paths, n_steps + 1), Vec(n_steps), Mat(), seed};
    for (Index k = 0; k < n_steps; ++k) ens.qv[k] = grid.dt(k);

    auto fill = [&](Mat& target, std::uint32_t stream) {
        NormalSampler sampler(seed, stream);
        target.resize(n_paths, n_steps + 1);
        target.col(0).setZero();
        Vec even(n_paths), odd(n_paths);
        for (Index k = 0; k < n_steps; k += 2) {
            sampler.fill_pair(even, odd, static_cast<std::uint64_t>(k) / 2);
            target.col(k + 1) = target.col(k) + std::sqrt(ens.qv[k]) * even;
            if (k + 1 < n_steps) {
                target.col(k + 2) = target.col(k + 1) + std::sqrt(ens.qv[k + 1]) * odd;
            }
        }
    };

    fill(ens.m, 0);
    if (with_second_driver) fill(ens.w, 1);
    return ens;
}

namespace {

// Accumulates  sum_k lambda_k dM_k + (w/2) sum_k lambda_k^2 d<M>_k  into
// `drift` and `qv_part`; shared by the deflator and the L2 norms.
template <typename PerStep>
void accumulate_steps(const RiskProcess& lambda, const PathEnsemble& ens, PerStep&& per_step) {
    const Index n_steps = ens.grid.n_steps();
    const Index n = ens.n_paths();
    Vec lam(n);
    for (Index k = 0; k < n_steps; ++k) {
        const double t = ens.grid.t(k);
        if (lambda.deterministic()) {
            lam.setConstant(lambda.at(t));
        } else {
            for (Index i = 0; i < n; ++i) lam[i] = lambda.at(t, ens.m(i, k));
        }
        per_step(k, lam);
    }
}

}  // namespace

Vec deflator_terminal(const RiskProcess& lambda, const PathEnsemble& ens) {
    if (lambda.kind() == RiskProcess::Kind::TerminalDensity) {
        if (std::abs(ens.grid.horizon() - 1.0) > 1e-12) {
            throw std::invalid_argument(
                "deflator_terminal: counterexample market requires horizon T = 1");
        }
        return counterexample_terminal_density(lambda.counterexample_index(), ens.terminal());
    }
    Vec logz = Vec::Zero(ens.n_paths());
    accumulate_steps(lambda, ens, [&](Index k, const Vec& lam) {
        logz -= lam * (ens.m.col(k + 1) - ens.m.col(k)) + 0.5 * lam.square() * ens.qv[k];
    });
    check_log_scale(logz, "stochastic exponential overflow");
    return logz.exp();
}

Mat stochastic_exponential(const RiskProcess& lambda, const PathEnsemble& ens) {
    if (!lambda.path_evaluable()) {
        throw std::invalid_argument(
            "stochastic_exponential: terminal-density kind has no path representation");
    }
    Mat z(ens.n_paths(), ens.grid.n_points());
    Vec logz = Vec::Zero(ens.n_paths());
    z.col(0).setOnes();
    accumulate_steps(lambda, ens, [&](Index k, const Vec& lam) {
        logz -= lam * (ens.m.col(k + 1) - ens.m.col(k)) + 0.5 * lam.square() * ens.qv[k];
        check_log_scale(logz, "stochastic exponential overflow");
        z.col(k + 1) = logz.exp();
    });
    return z;
}

AssetPaths asset_path(const RiskProcess& lambda, const PathEnsemble& ens, AssetForm form) {
    const Index n = ens.n_paths();
    AssetPaths out;
    out.s.resize(n, ens.grid.n_points());
    out.negative = BoolVec::Constant(n, false);

    if (form == AssetForm::Additive) {
        out.s.col(0).setOnes();
        Vec drift = Vec::Zero(n);
        accumulate_steps(lambda, ens, [&](Index k, const Vec& lam) {
            drift += lam * ens.qv[k];
            out.s.col(k + 1) = 1.0 + ens.m.col(k + 1) + drift;
            out.negative = out.negative || (out.s.col(k + 1) < 0.0);
        });
    } else {
        Vec logs = Vec::Zero(n);
        out.s.col(0).setOnes();
        accumulate_steps(lambda, ens, [&](Index k, const Vec& lam) {
            logs += (lam - 0.5) * ens.qv[k] + (ens.m.col(k + 1) - ens.m.col(k));
            check_log_scale(logs, "asset path overflow");
            out.s.col(k + 1) = logs.exp();
        });
    }
    return out;
}

WealthPaths wealth_path(const Strategy& strategy, const RiskProcess& lambda,
                        const PathEnsemble& ens, double initial_wealth, AssetForm form) {
    if (!(initial_wealth > 0.0))
        throw std::invalid_argument("wealth_path: initial wealth must be positive");
    if (!strategy) throw std::invalid_argument("wealth_path: empty strategy");

    AssetPaths asset = asset_path(lambda, ens, form);
    const Index n = ens.n_paths();
    const Index n_steps = ens.grid.n_steps();

    WealthPaths out;
    out.x.resize(n, n_steps + 1);
    out.x.col(0).setConstant(initial_wealth);
    out.admissible = BoolVec::Constant(n, true);

    for (Index k = 0; k < n_steps; ++k) {
        const double t = ens.grid.t(k);
        for (Index i = 0; i < n; ++i) {
            const double h = strategy(k, t, asset.s(i, k), out.x(i, k), ens.m(i, k));
            out.x(i, k + 1) = out.x(i, k) + h * (asset.s(i, k + 1) - asset.s(i, k));
        }
        out.admissible = out.admissible && (out.x.col(k + 1) >= 0.0);
    }
    return out;
}

double l2_mu_m_norm(const RiskProcess& lambda, const PathEnsemble& ens) {
    switch (lambda.kind()) {
        case RiskProcess::Kind::Constant:
        case RiskProcess::Kind::TimePoly:
            return poly_product_integral(lambda.coeffs(), lambda.coeffs(), ens.grid.horizon());
        case RiskProcess::Kind::StateRule: {
            Vec acc = Vec::Zero(ens.n_paths());
            accumulate_steps(lambda, ens,
                             [&](Index k, const Vec& lam) { acc += lam.square() * ens.qv[k]; });
            return mc_mean(acc).value;
        }
        case RiskProcess::Kind::TerminalDensity:
            throw std::invalid_argument("l2_mu_m_norm: terminal-density kind is not path-evaluable");
    }
    return 0.0;
}

double l2_mu_m_distance(const RiskProcess& a, const RiskProcess& b, const PathEnsemble& ens) {
    if (a.deterministic() && b.deterministic()) {
        Vec d = poly_diff(a.coeffs(), b.coeffs());
        return std::sqrt(std::max(0.0, poly_product_integral(d, d, ens.grid.horizon())));
    }
    if (!a.path_evaluable() || !b.path_evaluable()) {
        throw std::invalid_argument("l2_mu_m_distance: kinds must be path-evaluable");
    }
    const Index n = ens.n_paths();
    Vec acc = Vec::Zero(n);
    for (Index k = 0; k < ens.grid.n_steps(); ++k) {
        const double t = ens.grid.t(k);
        for (Index i = 0; i < n; ++i) {
            const double d = a.at(t, ens.m(i, k)) - b.at(t, ens.m(i, k));
            acc[i] += d * d * ens.qv[k];
        }
    }
    return std::sqrt(std::max(0.0, mc_mean(acc).value));
}

double ucp_distance(const RiskProcess& a, const RiskProcess& b, const PathEnsemble& ens) {
    if (!a.path_evaluable() || !b.path_evaluable()) {
        throw std::invalid_argument("ucp_distance: kinds must be path-evaluable");
    }
    const Index n = ens.n_paths();
    Vec sup = Vec::Zero(n);
    for (Index k = 0; k < ens.grid.n_steps(); ++k) {
        const double t = ens.grid.t(k);
        if (a.deterministic() && b.deterministic()) {
            const double d = std::abs(a.at(t) - b.at(t));
            sup = sup.max(d);
        } else {
            for (Index i = 0; i < n; ++i) {
                const double d = std::abs(a.at(t, ens.m(i, k)) - b.at(t, ens.m(i, k)));
                if (d > sup[i]) sup[i] = d;
            }
        }
    }
    return ky_fan_distance(sup, Vec::Zero(n));
}

}  // namespace umlab

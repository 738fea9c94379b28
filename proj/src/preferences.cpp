#include "umlab/preferences.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace umlab {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw std::domain_error(std::string(what) + ": argument must be positive");
}

Vec geometric_grid(double lo, double hi, Index n) {
    Vec g(n);
    const double step = std::log(hi / lo) / static_cast<double>(n - 1);
    for (Index i = 0; i < n; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
    return g;
}

}  // namespace

UtilityPair::UtilityPair(std::string label, Kind kind, Fn u, Fn marginal, Fn inverse_marginal,
                         Fn conjugate, Fn conjugate_derivative, std::optional<double> gamma)
    : label_(std::move(label)),
      kind_(kind),
      u_(std::move(u)),
      du_(std::move(marginal)),
      inv_du_(std::move(inverse_marginal)),
      v_(std::move(conjugate)),
      dv_(std::move(conjugate_derivative)),
      gamma_(gamma) {
    if (!u_ || !du_ || !inv_du_ || !v_ || !dv_)
        throw std::invalid_argument("UtilityPair: all five functions are required");
}

double UtilityPair::U(double x) const {
    require_positive(x, "U");
    return u_(x);
}
double UtilityPair::U_prime(double x) const {
    require_positive(x, "U'");
    return du_(x);
}
double UtilityPair::I(double y) const {
    require_positive(y, "I");
    return inv_du_(y);
}
double UtilityPair::V(double y) const {
    require_positive(y, "V");
    return v_(y);
}
double UtilityPair::V_prime(double y) const {
    require_positive(y, "V'");
    return dv_(y);
}

Vec UtilityPair::U(const Vec& x) const {
    return x.unaryExpr([this](double v) { return U(v); });
}
Vec UtilityPair::U_prime(const Vec& x) const {
    return x.unaryExpr([this](double v) { return U_prime(v); });
}
Vec UtilityPair::I(const Vec& y) const {
    return y.unaryExpr([this](double v) { return I(v); });
}
Vec UtilityPair::V(const Vec& y) const {
    return y.unaryExpr([this](double v) { return V(v); });
}
Vec UtilityPair::V_plus(const Vec& y) const {
    return y.unaryExpr([this](double v) { return std::max(V(v), 0.0); });
}

UtilityPair make_log() {
    return UtilityPair(
        "log", UtilityPair::Kind::Log, [](double x) { return std::log(x); },
        [](double x) { return 1.0 / x; }, [](double y) { return 1.0 / y; },
        [](double y) { return -std::log(y) - 1.0; }, [](double y) { return -1.0 / y; });
}

UtilityPair make_power(double gamma) {
    if (!(gamma < 1.0) || gamma == 0.0)
        throw std::invalid_argument("make_power: gamma must lie in (-inf, 1) \\ {0}");
    const double gp = gamma / (1.0 - gamma);  // conjugate exponent
    return UtilityPair(
        "power", UtilityPair::Kind::Power,
        [gamma](double x) { return std::pow(x, gamma) / gamma; },
        [gamma](double x) { return std::pow(x, gamma - 1.0); },
        [gamma](double y) { return std::pow(y, 1.0 / (gamma - 1.0)); },
        [gp](double y) { return std::pow(y, -gp) / gp; },
        [gp](double y) { return -std::pow(y, -gp - 1.0); }, gamma);
}

void validate_utility(const UtilityPair& u, double tolerance) {
    const Vec xs = geometric_grid(1e-6, 1e6, 200);

    // strict concavity / strict increase: U' positive, strictly decreasing
    double prev = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < xs.size(); ++i) {
        const double d = u.U_prime(xs[i]);
        if (!(d > 0.0)) throw std::invalid_argument("validate_utility: marginal not positive");
        if (!(d < prev))
            throw std::invalid_argument("validate_utility: marginal not strictly decreasing");
        prev = d;
    }
    // Inada, numerically: marginal keeps rising toward the grid minimum and
    // keeps falling toward the grid maximum, relative to its value at 1
    const double scale1 = u.U_prime(1.0);
    if (!(u.U_prime(xs[0]) > 2.0 * scale1) || !(u.U_prime(xs[xs.size() - 1]) < 0.5 * scale1))
        throw std::invalid_argument("validate_utility: Inada conditions fail on the grid");

    // conjugacy: V(y) >= U(x) - xy, equality at x = I(y); and -V' = I
    const Vec ys = geometric_grid(1e-3, 1e3, 60);
    for (Index j = 0; j < ys.size(); ++j) {
        const double y = ys[j];
        const double xstar = u.I(y);
        const double gap = u.V(y) - (u.U(xstar) - xstar * y);
        const double scale = std::max(1.0, std::abs(u.V(y)));
        if (std::abs(gap) > tolerance * scale)
            throw std::invalid_argument("validate_utility: conjugacy equality fails at x = I(y)");
        if (std::abs(-u.V_prime(y) - xstar) > tolerance * std::max(1.0, xstar))
            throw std::invalid_argument("validate_utility: -V' does not match I");
        for (double x : {0.5 * xstar, 2.0 * xstar}) {
            if (u.V(y) < u.U(x) - x * y - tolerance * scale)
                throw std::invalid_argument("validate_utility: conjugate inequality fails");
        }
    }
}

ElasticityEstimate asymptotic_elasticity(const UtilityPair& u, double x_lo, double x_hi,
                                         Index n_points) {
    if (!(x_hi >= 1e6))
        throw std::invalid_argument("asymptotic_elasticity: grid must extend to at least 1e6");
    const Vec xs = geometric_grid(x_lo, x_hi, n_points);

    ElasticityEstimate est;
    const double top = u.U(xs[xs.size() - 1]);
    const double next = u.U(xs[xs.size() - 2]);
    est.unbounded_u = top > 0.0 && (top - next) > 1e-9 * std::max(1.0, std::abs(top));
    if (!est.unbounded_u) {
        est.value = 0.0;  // AE defined as 0 when U(inf) < infinity
        est.reasonable = true;
        return est;
    }
    // limsup proxy: running max over the outer quarter of the grid
    double running = -std::numeric_limits<double>::infinity();
    for (Index i = (3 * xs.size()) / 4; i < xs.size(); ++i) {
        const double ratio = xs[i] * u.U_prime(xs[i]) / u.U(xs[i]);
        running = std::max(running, ratio);
    }
    est.value = running;
    est.reasonable = running < 1.0;
    return est;
}

}  // namespace umlab

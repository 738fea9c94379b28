#include "umlab/case_studies.hpp"

#include "umlab/duality.hpp"
#include "umlab/normal.hpp"
#include "umlab/rng.hpp"
#include "umlab/stability.hpp"

#include <cmath>
#include <stdexcept>

namespace umlab {

CounterexampleParams counterexample_params(int n) {
    if (n < 2) throw std::invalid_argument("counterexample_params: n must be >= 2");
    CounterexampleParams p;
    p.n = n;
    const double n5 = std::pow(static_cast<double>(n), -5.0);
    const double n4 = std::pow(static_cast<double>(n), -4.0);
    const double n3 = std::pow(static_cast<double>(n), -3.0);
    p.alpha = norm_quantile(1.0 - 0.5 * n5);
    p.beta = norm_quantile(0.5 * n3);
    p.mean_f = 1.0 + n4 - 0.5 * n5 - 0.5 * n3;
    p.c = 1.0 / p.mean_f;
    return p;
}

double counterexample_power_moment(int n, double a) {
    const double nd = static_cast<double>(n);
    const double p_high = 0.5 * std::pow(nd, -5.0);  // P(B_1 >= alpha_n)
    const double p_low = 0.5 * std::pow(nd, -3.0);   // P(B_1 <= beta_n)
    const double p_mid = 1.0 - p_high - p_low;
    return std::pow(nd, a) * p_high + p_mid + std::pow(nd, -a) * p_low;
}

Vec counterexample_terminal_density(int n, const Vec& b_terminal) {
    const CounterexampleParams p = counterexample_params(n);
    const double nd = static_cast<double>(n);
    return b_terminal.unaryExpr([&](double b) {
        const double f = b >= p.alpha ? nd : (b <= p.beta ? 1.0 / nd : 1.0);
        return p.c * f;
    });
}

double counterexample_multiplier(int n) {
    const CounterexampleParams p = counterexample_params(n);
    const double y4 = std::pow(p.c, -3.0) * counterexample_power_moment(n, -3.0);
    return std::pow(y4, 0.25);
}

double counterexample_norm_bound(int n) {
    const CounterexampleParams p = counterexample_params(n);
    const double nd = static_cast<double>(n);
    const double p_high = 0.5 * std::pow(nd, -5.0);
    const double p_low = 0.5 * std::pow(nd, -3.0);
    const double p_mid = 1.0 - p_high - p_low;
    const double high = (nd * p.c - 1.0) * (nd * p.c - 1.0) * p_high;
    const double mid = (p.c - 1.0) * (p.c - 1.0) * p_mid;
    const double low = (p.c / nd - 1.0) * (p.c / nd - 1.0) * p_low;
    return nd * nd * (high + mid + low);
}

CounterexampleWealth counterexample_wealth(int n, Index n_samples, std::uint64_t seed) {
    if (n_samples < 1)
        throw std::invalid_argument("counterexample_wealth: n_samples must be positive");
    counterexample_params(n);  // validates n

    Vec b(n_samples);
    NormalSampler sampler(seed, 0);
    sampler.fill_column(b, 0);

    CounterexampleWealth out;
    out.y = counterexample_multiplier(n);
    out.z = counterexample_terminal_density(n, b);
    out.wealth = std::pow(out.y, -4.0) * out.z.pow(-4.0);
    out.ky_fan_to_two_thirds = ky_fan_distance(out.wealth, Vec::Constant(n_samples, 2.0 / 3.0));
    out.budget = mc_mean(Vec(out.z * out.wealth));
    out.y4_mc = mc_mean(Vec(out.z.pow(-3.0)));  // y_n^4 = E[Z^-3]
    return out;
}

LogValueResult log_value_function(const RiskProcess& lambda, double x, const PathEnsemble& ens) {
    if (!(x > 0.0)) throw std::invalid_argument("log_value_function: x must be positive");
    LogValueResult out;
    const Vec z = deflator_terminal(lambda, ens);
    out.mc = mc_mean(Vec(std::log(x) - z.log()));
    out.closed_form = std::log(x) + 0.5 * l2_mu_m_norm(lambda, ens);
    out.gap = out.mc.value - out.closed_form;
    return out;
}

}  // namespace umlab

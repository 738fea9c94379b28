#pragma once

#include "umlab/market.hpp"
#include "umlab/stats.hpp"
#include "umlab/types.hpp"

#include <cstdint>

namespace umlab {

/// Parameters of the n-th instability market.  The terminal density
/// takes the value n above the alpha quantile, 1 in the middle band and
/// 1/n below the beta quantile, with
///   Phi(alpha_n) = 1 - n^-5 / 2,   Phi(beta_n) = n^-3 / 2,
/// and c_n = 1 / E[f^n] normalizing the deflator to mean one.
struct CounterexampleParams {
    int n = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double mean_f = 0.0;  // 1 + n^-4 - n^-5/2 - n^-3/2, exactly
    double c = 0.0;       // 1 / mean_f
};

/// n >= 2; n = 1 degenerates (the middle band is empty).
CounterexampleParams counterexample_params(int n);

/// E[(f^n)^a] in closed form.
double counterexample_power_moment(int n, double a);

/// Z_T = c_n f^n(b) evaluated on terminal driver samples.
Vec counterexample_terminal_density(int n, const Vec& b_terminal);

/// Lagrange multiplier y_n of the unit-wealth power-3/4 investor,
/// closed form; y_n^4 = c_n^-3 E[(f^n)^-3] -> 3/2.
double counterexample_multiplier(int n);

/// Upper bound on ||lambda^n||^2 in L^2(P x Leb) from the Ito isometry:
/// n^2 E[(c_n f^n - 1)^2], closed form; -> 0 like 1/n.
double counterexample_norm_bound(int n);

struct CounterexampleWealth {
    double y = 0.0;               // closed-form multiplier
    Vec z;                        // sampled terminal deflators
    Vec wealth;                   // optimal terminal wealth y^-4 Z^-4
    double ky_fan_to_two_thirds = 0.0;
    MCStat budget;                // mean[Z X], should be 1
    MCStat y4_mc;                 // Monte Carlo estimate of y_n^4
};

/// Samples B_1 ~ N(0,1), forms the terminal market and the power-3/4
/// optimal wealth, and measures its distance to the constant 2/3.
CounterexampleWealth counterexample_wealth(int n, Index n_samples, std::uint64_t seed);

struct LogValueResult {
    MCStat mc;                 // mean log(x / Z_T)
    double closed_form = 0.0;  // log x + ||lambda||^2 / 2
    double gap = 0.0;
};

/// The log-investor value identity u(x) = log x + ||lambda||^2 / 2,
/// Monte Carlo against the closed form.
LogValueResult log_value_function(const RiskProcess& lambda, double x, const PathEnsemble& ens);

}  // namespace umlab

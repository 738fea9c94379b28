#pragma once

#include "umlab/types.hpp"

#include <functional>
#include <optional>
#include <string>

namespace umlab {

/// A utility function bundled with its marginal, inverse marginal,
/// Legendre-Fenchel conjugate and conjugate derivative.  All five maps
/// live on (0, infinity); arguments outside the domain raise
/// std::domain_error (the conventional extension U = -infinity on the
/// negative axis is a domain error here, not a sentinel).
class UtilityPair {
  public:
    enum class Kind { Log, Power, Custom };
    using Fn = std::function<double(double)>;

    UtilityPair(std::string label, Kind kind, Fn u, Fn marginal, Fn inverse_marginal, Fn conjugate,
                Fn conjugate_derivative, std::optional<double> gamma = std::nullopt);

    double U(double x) const;
    double U_prime(double x) const;
    double I(double y) const;
    double V(double y) const;
    double V_prime(double y) const;

    Vec U(const Vec& x) const;
    Vec U_prime(const Vec& x) const;
    Vec I(const Vec& y) const;
    Vec V(const Vec& y) const;
    Vec V_plus(const Vec& y) const;

    const std::string& label() const { return label_; }
    Kind kind() const { return kind_; }
    std::optional<double> gamma() const { return gamma_; }

  private:
    std::string label_;
    Kind kind_;
    Fn u_, du_, inv_du_, v_, dv_;
    std::optional<double> gamma_;
};

/// U(x) = log x;  I(y) = 1/y;  V(y) = -log y - 1.
UtilityPair make_log();

/// U(x) = x^gamma / gamma for gamma in (-inf, 1) \ {0};
/// V(y) = y^(-gamma') / gamma' with gamma' = gamma / (1 - gamma).
UtilityPair make_power(double gamma);

/// Validates a five-function bundle on log-spaced grids: marginal
/// positive and strictly decreasing, Inada behavior at the grid edges,
/// conjugacy V(y) >= U(x) - xy with equality at x = I(y), and -V' = I.
/// Throws std::invalid_argument naming the first failed check.
void validate_utility(const UtilityPair& u, double tolerance = 1e-8);

struct ElasticityEstimate {
    double value = 0.0;        // running max of x U'(x) / U(x) over the tail
    bool reasonable = false;   // estimate < 1
    bool unbounded_u = false;  // whether U appears to grow without bound
};

/// Heuristic tail estimate of the asymptotic elasticity on a geometric
/// grid; the estimate is 0 by definition when U stays bounded above.
ElasticityEstimate asymptotic_elasticity(const UtilityPair& u, double x_lo = 1e2,
                                         double x_hi = 1e8, Index n_points = 200);

}  // namespace umlab

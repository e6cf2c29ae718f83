#pragma once

#include <functional>

namespace gevqmc {

/// The univariate generalized beta-Gaussian law N_beta(0, 1) with density
/// c_beta * exp(-|y|^beta / beta). beta = 2 is the standard normal and
/// beta = 1 the Laplace law.
class BetaGaussian {
public:
    explicit BetaGaussian(double beta);

    double beta() const noexcept { return beta_; }
    /// Normalization 1 / (2 beta^(1/beta) Gamma(1 + 1/beta)).
    double c_beta() const noexcept { return c_beta_; }

    double density(double y) const noexcept;
    double cdf(double y) const noexcept;

    /// Inverse CDF. t is clamped to [1e-300, 1 - 1e-16] before inversion so
    /// shifted lattice points arbitrarily close to 0 or 1 map to finite values.
    /// Throws DomainError for t outside (0, 1).
    double inv_cdf(double t) const;

    /// E|Y|^tau = Gamma((tau+1)/beta) / (beta^(1 - tau/beta) Gamma(1 + 1/beta)).
    double abs_moment(double tau) const;

    /// E[|Y|^nu exp(alpha |Y|^tau)] by adaptive quadrature. Requires tau <= beta,
    /// and alpha < 1/beta when tau == beta (otherwise the integral diverges and
    /// DomainError is thrown).
    double exp_moment(double alpha, double tau, int nu) const;

private:
    double beta_;
    double c_beta_;
    double inv_beta_;
};

struct QuadratureSpec {
    double abs_tol = 1e-13;
    double rel_tol = 1e-12;
    int max_subdivisions = 1 << 15;

    void validate() const;
};

/// Bound on the tail mass of |f| beyond the cutoff: returns an upper bound of
/// the integral of |f| over {|y| > T}.
using TailBound = std::function<double(double)>;

struct QuadratureResult {
    double value;
    double error_estimate;
    double cutoff;
};

/// Integrates f over the real line. The line is cut to [-T, T] where T is the
/// smallest power of two (>= 1) with tail(T) < abs_tol / 10; both halves are
/// integrated by adaptive Gauss-Kronrod with a breakpoint at 0. Throws
/// NumericalError when the error estimate exceeds the requested tolerance.
QuadratureResult quad_oracle(const std::function<double(double)>& f, const TailBound& tail,
                             const QuadratureSpec& spec = {});

}  // namespace gevqmc

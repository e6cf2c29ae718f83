#pragma once

namespace gevqmc::special {

/// Regularized lower incomplete gamma function P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma function Q(a, x) = 1 - P(a, x).
///
/// Evaluated directly (not as 1 - P) in the continued-fraction regime, so the
/// result keeps full relative accuracy deep in the tail.
double gamma_q(double a, double x);

/// log Q(a, x); finite even where Q itself underflows.
double log_gamma_q(double a, double x);

/// Solves Q(a, x) = q for x >= 0, 0 < q <= 1.
double gamma_q_inv(double a, double q);

namespace detail {
// Q(a, x) = q with p = 1 - q passed separately to keep precision near q = 1.
double gamma_inv_pq(double a, double p, double q);
}  // namespace detail

/// Riemann zeta function for real s > 1 (Euler-Maclaurin summation).
double zeta(double s);

}  // namespace gevqmc::special

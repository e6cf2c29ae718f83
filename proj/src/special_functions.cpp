#include "gevqmc/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gevqmc/errors.hpp"

namespace gevqmc::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 1000;

void check_args(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw DomainError("incomplete gamma: need a > 0 and x >= 0");
}

// log of the common prefactor x^a e^-x / Gamma(a)
double log_prefactor(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

// P(a, x) by the power series; valid for x < a + 1.
double series_p(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) return sum * std::exp(log_prefactor(a, x));
    }
    throw NumericalError("incomplete gamma series did not converge");
}

// log Q(a, x) by the continued fraction (modified Lentz); valid for x >= a + 1.
double log_cf_q(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return log_prefactor(a, x) + std::log(h);
    }
    throw NumericalError("incomplete gamma continued fraction did not converge");
}

}  // namespace

double gamma_p(double a, double x) {
    check_args(a, x);
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return series_p(a, x);
    return -std::expm1(log_cf_q(a, x));
}

double gamma_q(double a, double x) {
    check_args(a, x);
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - series_p(a, x);
    return std::exp(log_cf_q(a, x));
}

double log_gamma_q(double a, double x) {
    check_args(a, x);
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return std::log1p(-series_p(a, x));
    return log_cf_q(a, x);
}

namespace detail {

// Solves Q(a, x) = q where p = 1 - q is supplied separately so that neither
// side loses relative precision. Newton on the log of whichever of P, Q is
// smaller, safeguarded by a bisection bracket.
double gamma_inv_pq(double a, double p, double q) {
    if (!(a > 0.0)) throw DomainError("gamma_q_inv: need a > 0");
    if (!(q > 0.0) || !(q <= 1.0)) throw DomainError("gamma_q_inv: need 0 < q <= 1");
    if (p <= 0.0) return 0.0;

    const bool use_q = q < p;
    const double target = std::log(use_q ? q : p);
    auto residual = [&](double x) {
        if (use_q) return log_gamma_q(a, x) - target;
        const double px = gamma_p(a, x);
        return (px > 0.0 ? std::log(px) : -std::numeric_limits<double>::infinity()) - target;
    };
    // residual is decreasing in x when using Q, increasing when using P.
    const double sign = use_q ? -1.0 : 1.0;

    double lo = 0.0;
    double hi = std::max(1.0, a);
    while (sign * residual(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw NumericalError("gamma_q_inv: bracket search failed");
    }

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
        const double r = residual(x);
        if (r == 0.0) return x;
        if (sign * r < 0.0)
            lo = x;
        else
            hi = x;
        // d/dx log Q = -dens / Q, d/dx log P = dens / P
        const double log_dens = (a - 1.0) * std::log(x) - x - std::lgamma(a);
        const double deriv = sign * std::exp(log_dens - (r + target));
        double next = x - r / deriv;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 4.0 * kEps * std::max(x, 1e-300) || hi - lo <= 4.0 * kEps * hi)
            return next;
        x = next;
    }
    throw NumericalError("gamma_q_inv did not converge");
}

}  // namespace detail

double gamma_q_inv(double a, double q) { return detail::gamma_inv_pq(a, 1.0 - q, q); }

double zeta(double s) {
    if (!(s > 1.0)) throw DomainError("zeta: argument must exceed 1, got " + std::to_string(s));
    constexpr int N = 20;
    // B_{2j} / (2j)! for j = 1..8
    constexpr double kBernoulliOverFactorial[] = {
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
        -3617.0 / 10670622842880000.0,
    };
    double sum = 0.0;
    for (int k = N - 1; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
    const double n = N;
    sum += std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s);
    // s (s+1) ... (s+2j-2) N^{-s-2j+1}
    double rising = s;
    double npow = std::pow(n, -s - 1.0);
    for (int j = 0; j < 8; ++j) {
        sum += kBernoulliOverFactorial[j] * rising * npow;
        rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
        npow /= n * n;
    }
    return sum;
}

}  // namespace gevqmc::special

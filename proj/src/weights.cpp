#include "gevqmc/weights.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "gevqmc/betagauss.hpp"
#include "gevqmc/errors.hpp"
#include "gevqmc/special_functions.hpp"

namespace gevqmc {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void SpaceParams::validate() const {
    if (!(beta > 0.0)) throw DomainError("beta must be positive");
    if (!(tau > 0.0 && tau <= beta)) throw DomainError("tau must lie in (0, beta], got " + fmt(tau));
    if (!(theta > 0.0)) throw DomainError("theta must be positive");
    if (tau_equals_beta()) {
        if (!(theta < 1.0 / beta))
            throw DomainError("tau == beta requires theta < 1/beta, got theta = " + fmt(theta));
        const double r_max = 1.0 - theta * beta / 2.0;
        // For beta >= 1 the bound is attained at r = r_max; below one an epsilon of room is needed.
        const bool r_ok = beta >= 1.0 ? (r > 0.5 && r <= r_max) : (r > 0.5 && r < r_max);
        if (!r_ok) throw DomainError("tau == beta requires r in (1/2, 1 - theta beta / 2), got r = " + fmt(r));
        if (!(delta > 0.0 && delta < 0.5 - theta * beta / 2.0))
            throw DomainError("tau == beta requires delta in (0, 1/2 - theta beta / 2), got delta = " + fmt(delta));
    } else {
        if (!(r > 0.5 && r < 1.0)) throw DomainError("r must lie in (1/2, 1), got " + fmt(r));
        if (!(delta > 0.0 && delta < 0.5)) throw DomainError("delta must lie in (0, 1/2), got " + fmt(delta));
    }
}

KernelCase kernel_case(const SpaceParams& sp) {
    if (sp.tau_equals_beta())
        return sp.beta < 1.0 ? KernelCase::tau_equals_beta_below_one : KernelCase::tau_equals_beta_at_least_one;
    return sp.beta < 1.0 ? KernelCase::tau_below_beta_below_one : KernelCase::tau_below_beta_at_least_one;
}

double kernel_constant_K(const SpaceParams& sp) {
    sp.validate();
    const double beta = sp.beta;
    const double tau = sp.tau;
    const double r = sp.r;
    const double log_c_beta = std::log(BetaGaussian(beta).c_beta());
    const double log_2gamma = std::log(2.0 * std::tgamma(1.0 / beta));

    // 4 pi^{-2r} / ((2r)(2 - 2r) c_beta)
    double log_k = std::log(4.0) - 2.0 * r * std::log(std::numbers::pi) - std::log(2.0 * r) -
                   std::log(2.0 - 2.0 * r) - log_c_beta;

    // Young-inequality factor for tau < beta, with eps = sqrt(1 + 2(1 - r)) - 1.
    const double e_sq = 1.0 + 2.0 * (1.0 - r);
    const double eps = std::sqrt(e_sq) - 1.0;
    auto young = [&] {
        const double q = beta / (beta - tau);
        return std::pow(eps / tau, 1.0 - q) * (beta - tau) / beta * std::pow(sp.theta, q);
    };

    switch (kernel_case(sp)) {
        case KernelCase::tau_below_beta_below_one:
            log_k += young();
            log_k += -e_sq * log_2gamma;
            log_k += (1.0 - beta) * e_sq / beta * std::log((1.0 - beta) / (std::numbers::e * beta * eps));
            log_k += e_sq / beta * std::log(std::sqrt(e_sq));
            break;
        case KernelCase::tau_equals_beta_below_one: {
            const double bt = beta * sp.theta;
            const double m = 3.0 - 2.0 * r;
            log_k += -m * log_2gamma;
            log_k += (1.0 - beta) * m / beta *
                     std::log((1.0 - beta) / (std::numbers::e * beta) * (1.0 + bt) / (m - 1.0 - bt));
            log_k += m / beta * std::log(m / (1.0 + bt));
            break;
        }
        case KernelCase::tau_below_beta_at_least_one:
            log_k += young();
            break;
        case KernelCase::tau_equals_beta_at_least_one:
            break;
    }
    const double K = std::exp(log_k);
    if (!std::isfinite(K) || !(K > 0.0)) throw NumericalError("kernel_constant_K: non-finite result");
    return K;
}

double select_lambda(double p, double sigma, const SpaceParams& sp) {
    sp.validate();
    if (!(p > 0.0 && p < 1.0)) throw DomainError("select_lambda: p must lie in (0, 1), got " + fmt(p));
    if (!(sigma > 0.0)) throw DomainError("select_lambda: sigma must be positive");
    const double inv_sigma = 1.0 / sigma;
    if (std::abs(p - inv_sigma) <= 1e-14) throw DomainError("select_lambda: p = 1/sigma is excluded");

    if (p > 2.0 / 3.0 && p < inv_sigma) {
        if (sp.tau_equals_beta() && !(sp.theta < (3.0 * p - 2.0) / (p * sp.beta)))
            throw DomainError("select_lambda: tau == beta with 2/3 < p < 1/sigma requires theta < (3p-2)/(p beta)");
        return p / (2.0 - p);
    }
    if (p <= std::min(2.0 / 3.0, inv_sigma)) {
        if (sp.tau_equals_beta()) return 1.0 / (2.0 - sp.theta * sp.beta - 2.0 * sp.delta);
        return 1.0 / (2.0 - 2.0 * sp.delta);
    }
    throw DomainError("select_lambda: p = " + fmt(p) + " exceeds 1/sigma = " + fmt(inv_sigma) +
                      "; no admissible lambda");
}

double theoretical_rate(double p, const SpaceParams& sp) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("theoretical_rate: p must lie in (0, 1)");
    const double qmc_cap = sp.tau_equals_beta() ? 1.0 - sp.theta * sp.beta / 2.0 - sp.delta : 1.0 - sp.delta;
    return std::min(1.0 / p - 0.5, qmc_cap);
}

PodWeights::PodWeights(double sigma, double lambda, std::vector<double> per_coord_factor)
    : sigma_(sigma), lambda_(lambda), factor_(std::move(per_coord_factor)) {
    if (!(sigma >= 0.0)) throw DomainError("PodWeights: sigma must be nonnegative");
    if (!(lambda > 0.5 && lambda <= 1.0)) throw DomainError("PodWeights: lambda must lie in (1/2, 1]");
    for (double f : factor_)
        if (!(f >= 0.0) || !std::isfinite(f)) throw DomainError("PodWeights: factors must be finite and >= 0");
}

double PodWeights::log_order_weight(int order) const { return exponent() * sigma_ * std::lgamma(order + 1.0); }

double PodWeights::product_weight(int j) const {
    if (j < 1 || j > max_dimension()) throw DomainError("PodWeights: coordinate out of range");
    return std::pow(factor_[j - 1], exponent());
}

double PodWeights::log_gamma(std::span<const int> u) const {
    double acc = log_order_weight(static_cast<int>(u.size()));
    for (int j : u) {
        if (j < 1 || j > max_dimension()) throw DomainError("PodWeights: coordinate out of range");
        acc += exponent() * std::log(factor_[j - 1]);
    }
    return acc;
}

double PodWeights::gamma(std::span<const int> u) const { return std::exp(log_gamma(u)); }

PodWeights build_pod_weights(int s_max, double sigma, double lambda, double C, std::span<const double> b,
                             std::span<const double> alpha, const SpaceParams& sp, double K) {
    sp.validate();
    if (s_max < 1) throw DomainError("build_pod_weights: s_max must be >= 1");
    if (b.size() < static_cast<std::size_t>(s_max) || alpha.size() < static_cast<std::size_t>(s_max))
        throw DomainError("build_pod_weights: b and alpha need s_max entries");
    if (!(K > 0.0)) throw DomainError("build_pod_weights: K must be positive");
    const double zeta_arg = 2.0 * sp.r * lambda;
    if (!(zeta_arg > 1.0))
        throw DomainError("build_pod_weights: 2 r lambda = " + fmt(zeta_arg) + " must exceed 1");
    const double log_denominator =
        0.5 * (lambda * std::log(K) + std::log(special::zeta(zeta_arg)) + std::lgamma(1.0 + 1.0 / sp.tau));
    std::vector<double> factor(s_max);
    for (int j = 0; j < s_max; ++j) {
        if (!(b[j] >= 0.0) || !(alpha[j] >= 0.0)) throw DomainError("build_pod_weights: b, alpha must be >= 0");
        const double gap = sp.theta - 2.0 * alpha[j];
        if (!(gap > 0.0))
            throw DomainError("build_pod_weights: theta must exceed 2 alpha_j (j = " + std::to_string(j + 1) + ")");
        factor[j] = b[j] == 0.0 ? 0.0
                                : std::exp(std::log((C + 1.0) * b[j]) - std::log(gap) / (2.0 * sp.tau) -
                                           log_denominator);
    }
    return PodWeights(sigma, lambda, std::move(factor));
}

double log_pod_weight_sum(const PodWeights& w, int s, const SpaceParams& sp, double K) {
    if (s < 0 || s > w.max_dimension()) throw DomainError("pod_weight_sum: s out of range");
    const double lambda = w.lambda();
    const double log_per_order = std::log(2.0 * special::zeta(2.0 * sp.r * lambda)) + lambda * std::log(K);
    const double kappa = lambda * w.exponent() * w.sigma();
    // acc[l] = log((l!)^kappa e_l(x_1, ..., x_j)) with x_j = per_order gamma_j^lambda.
    // The plain recursion overflows long before the series settles.
    constexpr double kEmpty = -std::numeric_limits<double>::infinity();
    auto log_add = [](double a, double b) {
        if (a < b) std::swap(a, b);
        return b == kEmpty ? a : a + std::log1p(std::exp(b - a));
    };
    std::vector<double> acc(s + 1, kEmpty);
    acc[0] = 0.0;
    for (int j = 1; j <= s; ++j) {
        const double log_x = log_per_order + lambda * std::log(w.product_weight(j));
        for (int l = j; l >= 1; --l)
            acc[l] = log_add(acc[l], log_x + kappa * std::log(static_cast<double>(l)) + acc[l - 1]);
    }
    double total = kEmpty;
    for (double v : acc) total = log_add(total, v);
    return total;
}

double pod_weight_sum(const PodWeights& w, int s, const SpaceParams& sp, double K) {
    return std::exp(log_pod_weight_sum(w, s, sp, K));
}

void write_weights(std::ostream& os, const PodWeights& w) {
    os.precision(17);
    os << w.sigma() << ' ' << w.lambda() << ' ' << w.exponent() << '\n';
    for (double f : w.per_coord_factor()) os << f << '\n';
}

PodWeights read_weights(std::istream& is) {
    std::string line;
    bool have_header = false;
    double sigma = 0.0, lambda = 0.0, exponent = 0.0;
    std::vector<double> factors;
    while (std::getline(is, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::istringstream ls(line);
        if (!have_header) {
            if (!(ls >> sigma >> lambda >> exponent)) throw ConfigError("weights file: malformed header");
            have_header = true;
            continue;
        }
        double f;
        if (!(ls >> f)) throw ConfigError("weights file: malformed factor line '" + line + "'");
        factors.push_back(f);
    }
    if (!have_header) throw ConfigError("weights file: missing header");
    if (std::abs(exponent - 2.0 / (1.0 + lambda)) > 1e-12)
        throw ConfigError("weights file: exponent inconsistent with lambda");
    return PodWeights(sigma, lambda, std::move(factors));
}

}  // namespace gevqmc

#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gevqmc {

/// Parameters of the weighted function space: weight function
/// psi^2(x) = exp(-theta |x|^tau) over the beta-Gaussian measure, the decay
/// parameter r of the kernel bound, and the rate slack delta.
struct SpaceParams {
    double tau = 0.5;
    double theta = 1.001;
    double r = 0.70;
    double delta = 0.05;
    double beta = 0.5;

    bool tau_equals_beta() const noexcept { return tau == beta; }
    /// Throws DomainError when a range constraint is violated.
    void validate() const;
};

/// Which closed form of the kernel constant applies.
enum class KernelCase {
    tau_below_beta_below_one,  // 0 < tau < beta < 1
    tau_equals_beta_below_one, // 0 < tau = beta < 1
    tau_below_beta_at_least_one,  // tau < 1 <= beta, or 1 <= tau < beta
    tau_equals_beta_at_least_one, // 1 <= tau = beta
};

KernelCase kernel_case(const SpaceParams& sp);

/// The constant K in the Fourier-coefficient bound K h^{-2r} of the
/// weighted-space kernel. Finite and positive on valid parameters.
double kernel_constant_K(const SpaceParams& sp);

/// lambda from the summability exponent p of b and the Gevrey exponent sigma.
/// The result lies in (1/(2r), 1]; DomainError when no admissible lambda exists
/// for the inputs.
double select_lambda(double p, double sigma, const SpaceParams& sp);

/// Exponent of the predicted RMS decay in phi(n):
/// min{1/p - 1/2, 1 - delta} (tau < beta), min{1/p - 1/2, 1 - theta beta / 2 - delta} (tau = beta).
double theoretical_rate(double p, const SpaceParams& sp);

/// Product-and-order-dependent weights
/// gamma_u = ((|u|!)^sigma prod_{j in u} f_j)^{2/(1+lambda)}, gamma_{} = 1.
class PodWeights {
public:
    PodWeights(double sigma, double lambda, std::vector<double> per_coord_factor);

    double sigma() const noexcept { return sigma_; }
    double lambda() const noexcept { return lambda_; }
    double exponent() const noexcept { return 2.0 / (1.0 + lambda_); }
    int max_dimension() const noexcept { return static_cast<int>(factor_.size()); }
    const std::vector<double>& per_coord_factor() const noexcept { return factor_; }

    /// gamma_u for a set of 1-based coordinates (duplicates not allowed).
    double gamma(std::span<const int> u) const;
    double log_gamma(std::span<const int> u) const;
    /// Product part gamma_j = f_j^{2/(1+lambda)}.
    double product_weight(int j) const;
    /// Order part Gamma_l = (l!)^{sigma 2/(1+lambda)}; log form.
    double log_order_weight(int order) const;

private:
    double sigma_;
    double lambda_;
    std::vector<double> factor_;
};

/// Builds the weights for the first s_max coordinates:
/// f_j = (C + 1) b_j / ((theta - 2 alpha_j)^{1/(2 tau)} sqrt(K^lambda zeta(2 r lambda) Gamma(1 + 1/tau))).
/// Requires theta > 2 alpha_j for all j <= s_max.
PodWeights build_pod_weights(int s_max, double sigma, double lambda, double C, std::span<const double> b,
                             std::span<const double> alpha, const SpaceParams& sp, double K);

/// sum over u subset of {1:s} of gamma_u^lambda (2 zeta(2 r lambda) K^lambda)^{|u|}, by
/// the order recursion over elementary symmetric sums. Includes u = {}.
double pod_weight_sum(const PodWeights& w, int s, const SpaceParams& sp, double K);
/// Its logarithm; stays finite where the sum itself overflows.
double log_pod_weight_sum(const PodWeights& w, int s, const SpaceParams& sp, double K);

/// Text format: line 1 "sigma lambda exponent", then one factor per line.
/// Lines starting with '#' are comments.
void write_weights(std::ostream& os, const PodWeights& w);
PodWeights read_weights(std::istream& is);

}  // namespace gevqmc

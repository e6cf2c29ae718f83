#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

namespace gevqmc {

/// psi_j(x) = amplitude j^{-vartheta} sin(pi j x_1) sin(pi j x_2).
double psi(int j, double vartheta, const Eigen::Vector2d& x, double amplitude = 0.5);

/// h(y) = y / (1 + sqrt|y|); |h'| <= 1 and |h(y)| <= min(|y|, sqrt|y|).
double link_h(double y) noexcept;
/// xi(y) = exp(-1/y^2), xi(0) = 0; values in [0, 1).
double gevrey_xi(double y) noexcept;

/// The coefficient
///   a(x, y) = exp(sum_j h(y_j) psi_j(x)) exp(xi(sum_j y_j psi_j(x))),
/// truncated after s terms. Its Gevrey bound uses sigma = 3/2, C_xi = 3.
struct GevreyField {
    double vartheta = 2.0;
    int s = 50;
    double amplitude = 0.5;
    double sigma = 1.5;
    double C_xi = 3.0;

    void validate() const;
    /// ||psi_j||_inf = amplitude j^{-vartheta}.
    double psi_sup_norm(int j) const;
    double evaluate(const Eigen::Vector2d& x, std::span<const double> y) const;
};

/// a0(x) exp(sum_j sqrt(lambda_j) psi_j(x) y_j) over user-supplied eigenpairs.
struct LognormalField {
    std::function<double(const Eigen::Vector2d&)> a0;
    std::vector<double> eigenvalues;
    std::vector<std::function<double(const Eigen::Vector2d&)>> eigenfunctions;

    double evaluate(const Eigen::Vector2d& x, std::span<const double> y) const;
};

/// The lognormal option used by the studies: a0 = 1, sqrt(lambda_j) psi_j
/// taken as the same psi_j as the Gevrey field.
LognormalField make_lognormal_field(const GevreyField& shape);

/// Coordinate sequences alpha_j = ||psi_j||, b_j = 2^sigma C_xi ||psi_j|| and a
/// summability exponent p with b in l^p.
struct CoordinateSequences {
    std::vector<double> alpha;
    std::vector<double> b;
    double p = 0.0;
};

/// p defaults to 1/vartheta + 1e-3 when p_override <= 0.
CoordinateSequences coordinate_sequences(const GevreyField& f, int count, double p_override = 0.0);

/// c exp(-sum_j alpha_j |y_j|^tau).
double a_min_model(double c, std::span<const double> alpha, double tau, std::span<const double> y);

/// psi_j(x_k) for points x_k (rows) and j = 1..s, as a points-by-s matrix.
/// The coefficient at all points for one y is then two matrix-vector products.
class FieldSampler {
public:
    enum class Kind { gevrey, lognormal };

    FieldSampler(const GevreyField& field, const Eigen::Matrix<double, Eigen::Dynamic, 2>& points,
                 Kind kind = Kind::gevrey);

    int s() const noexcept { return static_cast<int>(basis_.cols()); }
    /// Writes a(x_k, y) for every point; y may be shorter than s (the
    /// remaining coordinates are taken as zero).
    void evaluate(std::span<const double> y, Eigen::VectorXd& out) const;

private:
    Kind kind_;
    Eigen::MatrixXd basis_;
};

}  // namespace gevqmc

#include "gevqmc/field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gevqmc/errors.hpp"

namespace gevqmc {

double psi(int j, double vartheta, const Eigen::Vector2d& x, double amplitude) {
    if (j < 1) throw DomainError("psi: j must be >= 1");
    const double pj = std::numbers::pi * j;
    return amplitude * std::pow(static_cast<double>(j), -vartheta) * std::sin(pj * x[0]) * std::sin(pj * x[1]);
}

double link_h(double y) noexcept { return y / (1.0 + std::sqrt(std::abs(y))); }

double gevrey_xi(double y) noexcept {
    // removable singularity; y^-2 overflows below ~1e-154
    if (std::abs(y) < 1e-150) return 0.0;
    return std::exp(-1.0 / (y * y));
}

void GevreyField::validate() const {
    if (!(vartheta > 1.0)) throw DomainError("GevreyField: vartheta must exceed 1");
    if (s < 1) throw DomainError("GevreyField: s must be >= 1");
    if (!(amplitude >= 0.0)) throw DomainError("GevreyField: amplitude must be >= 0");
}

double GevreyField::psi_sup_norm(int j) const { return amplitude * std::pow(static_cast<double>(j), -vartheta); }

double GevreyField::evaluate(const Eigen::Vector2d& x, std::span<const double> y) const {
    // ascending j with Kahan compensation on both series
    double sum_h = 0.0, comp_h = 0.0;
    double sum_y = 0.0, comp_y = 0.0;
    const int terms = std::min<int>(s, static_cast<int>(y.size()));
    for (int j = 1; j <= terms; ++j) {
        const double pj = psi(j, vartheta, x, amplitude);
        const double th = link_h(y[j - 1]) * pj - comp_h;
        const double nh = sum_h + th;
        comp_h = (nh - sum_h) - th;
        sum_h = nh;
        const double ty = y[j - 1] * pj - comp_y;
        const double ny = sum_y + ty;
        comp_y = (ny - sum_y) - ty;
        sum_y = ny;
    }
    return std::exp(sum_h + gevrey_xi(sum_y));
}

double LognormalField::evaluate(const Eigen::Vector2d& x, std::span<const double> y) const {
    if (eigenvalues.size() != eigenfunctions.size())
        throw DomainError("LognormalField: eigenvalue/eigenfunction count mismatch");
    const std::size_t terms = std::min(y.size(), eigenvalues.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < terms; ++j) sum += std::sqrt(eigenvalues[j]) * eigenfunctions[j](x) * y[j];
    return a0(x) * std::exp(sum);
}

LognormalField make_lognormal_field(const GevreyField& shape) {
    LognormalField field;
    field.a0 = [](const Eigen::Vector2d&) { return 1.0; };
    for (int j = 1; j <= shape.s; ++j) {
        field.eigenvalues.push_back(1.0);
        field.eigenfunctions.push_back(
            [j, shape](const Eigen::Vector2d& x) { return psi(j, shape.vartheta, x, shape.amplitude); });
    }
    return field;
}

CoordinateSequences coordinate_sequences(const GevreyField& f, int count, double p_override) {
    f.validate();
    CoordinateSequences seq;
    seq.alpha.resize(count);
    seq.b.resize(count);
    const double b_scale = std::pow(2.0, f.sigma) * f.C_xi;
    for (int j = 1; j <= count; ++j) {
        seq.alpha[j - 1] = f.psi_sup_norm(j);
        seq.b[j - 1] = b_scale * f.psi_sup_norm(j);
    }
    seq.p = p_override > 0.0 ? p_override : 1.0 / f.vartheta + 1e-3;
    return seq;
}

double a_min_model(double c, std::span<const double> alpha, double tau, std::span<const double> y) {
    if (!(c > 0.0)) throw DomainError("a_min_model: c must be positive");
    if (alpha.size() < y.size()) throw DomainError("a_min_model: alpha shorter than y");
    double sum = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) sum += alpha[j] * std::pow(std::abs(y[j]), tau);
    return c * std::exp(-sum);
}

FieldSampler::FieldSampler(const GevreyField& field, const Eigen::Matrix<double, Eigen::Dynamic, 2>& points,
                           Kind kind)
    : kind_(kind), basis_(points.rows(), field.s) {
    field.validate();
    for (int j = 1; j <= field.s; ++j)
        for (Eigen::Index k = 0; k < points.rows(); ++k)
            basis_(k, j - 1) = psi(j, field.vartheta, points.row(k).transpose(), field.amplitude);
}

void FieldSampler::evaluate(std::span<const double> y, Eigen::VectorXd& out) const {
    const Eigen::Index used = std::min<Eigen::Index>(basis_.cols(), static_cast<Eigen::Index>(y.size()));
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), used);
    const auto basis = basis_.leftCols(used);
    if (kind_ == Kind::lognormal) {
        out = (basis * yv).array().exp();
        return;
    }
    Eigen::VectorXd hy(used);
    for (Eigen::Index j = 0; j < used; ++j) hy[j] = link_h(yv[j]);
    out.noalias() = basis * hy;
    const Eigen::VectorXd inner = basis * yv;
    for (Eigen::Index k = 0; k < out.size(); ++k) out[k] = std::exp(out[k] + gevrey_xi(inner[k]));
}

}  // namespace gevqmc

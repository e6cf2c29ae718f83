#include "gevqmc/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "gevqmc/errors.hpp"

namespace gevqmc {

MultiIndex::MultiIndex(std::initializer_list<int> entries) {
    int j = 1;
    for (int v : entries) set(j++, v);
}

MultiIndex MultiIndex::from_dense(std::span<const int> entries) {
    MultiIndex nu;
    for (std::size_t j = 0; j < entries.size(); ++j) nu.set(static_cast<int>(j) + 1, entries[j]);
    return nu;
}

MultiIndex MultiIndex::unit(int j) {
    MultiIndex nu;
    nu.set(j, 1);
    return nu;
}

int MultiIndex::operator[](int j) const {
    const auto it = entries_.find(j);
    return it == entries_.end() ? 0 : it->second;
}

void MultiIndex::set(int j, int value) {
    if (j < 1) throw DomainError("MultiIndex: coordinates are 1-based");
    if (value < 0) throw DomainError("MultiIndex: entries must be nonnegative");
    order_ -= (*this)[j];
    if (value == 0)
        entries_.erase(j);
    else
        entries_[j] = value;
    order_ += value;
}

int MultiIndex::max_coordinate() const noexcept { return entries_.empty() ? 0 : entries_.rbegin()->first; }

bool MultiIndex::dominates(const MultiIndex& m) const {
    return std::all_of(m.entries_.begin(), m.entries_.end(),
                       [this](const auto& kv) { return kv.second <= (*this)[kv.first]; });
}

double MultiIndex::binomial(const MultiIndex& m) const {
    double result = 1.0;
    for (const auto& [j, mj] : m.entries_) {
        const int nj = (*this)[j];
        // binom(nj, mj) through lgamma is exact enough for nj <= 170
        result *= std::round(std::exp(std::lgamma(nj + 1.0) - std::lgamma(mj + 1.0) - std::lgamma(nj - mj + 1.0)));
    }
    return result;
}

double MultiIndex::power(std::span<const double> b) const {
    double result = 1.0;
    for (const auto& [j, v] : entries_) {
        if (static_cast<std::size_t>(j) > b.size())
            throw DomainError("MultiIndex::power: sequence shorter than the support");
        result *= std::pow(b[j - 1], v);
    }
    return result;
}

std::vector<MultiIndex> MultiIndex::sub_indices() const {
    std::vector<std::pair<int, int>> support(entries_.begin(), entries_.end());
    std::vector<MultiIndex> out;
    std::vector<int> counter(support.size(), 0);
    while (true) {
        MultiIndex m;
        for (std::size_t k = 0; k < support.size(); ++k) m.set(support[k].first, counter[k]);
        out.push_back(std::move(m));
        std::size_t k = support.size();
        while (k > 0) {
            --k;
            if (++counter[k] <= support[k].second) break;
            counter[k] = 0;
            if (k == 0) return out;
        }
        if (support.empty()) return out;
    }
}

MultiIndex MultiIndex::operator-(const MultiIndex& m) const {
    if (!dominates(m)) throw DomainError("MultiIndex subtraction requires m <= nu");
    MultiIndex out = *this;
    for (const auto& [j, v] : m.entries_) out.set(j, (*this)[j] - v);
    return out;
}

void GevreyParams::validate() const {
    if (!(sigma >= 1.0)) throw DomainError("GevreyParams: sigma must be >= 1");
    if (!(C > 0.0) || !(C0 > 0.0)) throw DomainError("GevreyParams: C and C0 must be positive");
}

namespace {

double factorial_pow(int k, double sigma) { return std::exp(sigma * std::lgamma(k + 1.0)); }

}  // namespace

double recurrence_upsilon(const MultiIndex& nu, const GevreyParams& p, std::span<const double> b, Recursion mode,
                          int max_order) {
    p.validate();
    if (nu.order() > max_order)
        throw DomainError("recurrence_upsilon: |nu| = " + std::to_string(nu.order()) + " exceeds cap " +
                          std::to_string(max_order));
    const double base = mode == Recursion::equality ? p.C0 : 0.5 * p.C0;

    // Sub-indices come out in lexicographic order, so every nu - m with m != 0
    // is visited before nu itself.
    std::map<MultiIndex, double> memo;
    for (const MultiIndex& current : nu.sub_indices()) {
        if (current.is_zero()) {
            memo[current] = base;
            continue;
        }
        double sum = 0.0;
        for (const MultiIndex& m : current.sub_indices()) {
            if (m.is_zero()) continue;
            sum += current.binomial(m) * factorial_pow(m.order(), p.sigma) * m.power(b) * memo.at(current - m);
        }
        memo[current] = p.C * sum;
    }
    return memo.at(nu);
}

double closed_form_bound(const MultiIndex& nu, const GevreyParams& p, std::span<const double> b) {
    p.validate();
    const int k = nu.order();
    const double a_k = k == 0 ? 1.0 : p.C * std::pow(p.C + 1.0, k - 1);
    return p.C0 * a_k * factorial_pow(k, p.sigma) * nu.power(b);
}

double solution_derivative_bound(const MultiIndex& nu, const GevreyParams& p, std::span<const double> b,
                                 double f_norm, double a_min) {
    p.validate();
    if (nu.is_zero()) throw DomainError("solution_derivative_bound: need |nu| >= 1");
    if (!(a_min > 0.0)) throw DomainError("solution_derivative_bound: a_min must be positive");
    const int k = nu.order();
    return f_norm / a_min * p.C * std::pow(p.C + 1.0, k - 1) * factorial_pow(k, p.sigma) * nu.power(b);
}

double appendix_bound(const MultiIndex& nu, double sigma, double C_xi, std::span<const double> psi_sup_norms,
                      bool linear_h) {
    if (!linear_h) {
        for (const auto& [j, v] : nu.support())
            if (v > 1)
                throw DomainError("appendix_bound: nu_" + std::to_string(j) +
                                  " > 1 requires a linear inner link (linear_h)");
    }
    double result = std::pow(std::exp(1.0) / 2.0, sigma) * factorial_pow(nu.order(), sigma);
    const double scale = std::pow(2.0, sigma) * C_xi;
    for (const auto& [j, v] : nu.support()) {
        if (static_cast<std::size_t>(j) > psi_sup_norms.size())
            throw DomainError("appendix_bound: psi norms shorter than the support");
        result *= std::pow(scale * psi_sup_norms[j - 1], v);
    }
    return result;
}

namespace {

struct Stencil {
    std::vector<int> offsets;
    std::vector<double> weights;  // scaled by step^order afterwards
};

const Stencil& central_stencil(int order) {
    static const Stencil kStencils[] = {
        {{0}, {1.0}},
        {{-1, 1}, {-0.5, 0.5}},
        {{-1, 0, 1}, {1.0, -2.0, 1.0}},
        {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}},
    };
    return kStencils[order];
}

// Tensor-product central difference of order nu at step h, for each grid point.
Eigen::VectorXd mixed_difference(const ParametricField& field, std::span<const double> y, const MultiIndex& nu,
                                 const Eigen::Matrix<double, Eigen::Dynamic, 2>& grid, double h) {
    std::vector<std::pair<int, const Stencil*>> axes;
    for (const auto& [j, v] : nu.support()) axes.emplace_back(j - 1, &central_stencil(v));

    Eigen::VectorXd result = Eigen::VectorXd::Zero(grid.rows());
    std::vector<double> shifted(y.begin(), y.end());
    std::vector<std::size_t> pos(axes.size(), 0);
    while (true) {
        double weight = 1.0;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const auto [coord, st] = axes[a];
            shifted[coord] = y[coord] + st->offsets[pos[a]] * h;
            weight *= st->weights[pos[a]];
        }
        for (Eigen::Index g = 0; g < grid.rows(); ++g)
            result[g] += weight * field(grid.row(g).transpose(), shifted);

        std::size_t a = 0;
        for (; a < axes.size(); ++a) {
            if (++pos[a] < axes[a].second->offsets.size()) break;
            pos[a] = 0;
        }
        if (a == axes.size()) break;
    }
    return result / std::pow(h, nu.order());
}

}  // namespace

double gevrey_ratio_fd(const ParametricField& field, std::span<const double> y, const MultiIndex& nu,
                       const Eigen::Matrix<double, Eigen::Dynamic, 2>& spatial_grid, double step) {
    if (nu.order() > 3) throw DomainError("gevrey_ratio_fd: only |nu| <= 3 is supported");
    if (static_cast<std::size_t>(nu.max_coordinate()) > y.size())
        throw DomainError("gevrey_ratio_fd: nu has support beyond the parameter vector");
    if (!(step > 0.0)) throw DomainError("gevrey_ratio_fd: step must be positive");

    Eigen::VectorXd values(spatial_grid.rows());
    for (Eigen::Index g = 0; g < spatial_grid.rows(); ++g) values[g] = field(spatial_grid.row(g).transpose(), y);
    if (nu.is_zero()) return 1.0;

    const Eigen::VectorXd coarse = mixed_difference(field, y, nu, spatial_grid, step);
    const Eigen::VectorXd fine = mixed_difference(field, y, nu, spatial_grid, 0.5 * step);
    const Eigen::VectorXd extrapolated = (4.0 * fine - coarse) / 3.0;
    return (extrapolated.array() / values.array()).abs().maxCoeff();
}

}  // namespace gevqmc

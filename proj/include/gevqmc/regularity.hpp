#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <vector>

namespace gevqmc {

/// Finitely supported multi-index nu = (nu_1, nu_2, ...). Coordinates are
/// 1-based, as in the parametric variable y = (y_1, y_2, ...); only nonzero
/// entries are stored.
class MultiIndex {
public:
    MultiIndex() = default;
    /// Dense construction: entries[0] is nu_1.
    MultiIndex(std::initializer_list<int> entries);
    static MultiIndex from_dense(std::span<const int> entries);
    /// The unit multi-index e_j.
    static MultiIndex unit(int j);

    int operator[](int j) const;
    void set(int j, int value);

    int order() const noexcept { return order_; }
    bool is_zero() const noexcept { return order_ == 0; }
    /// Largest coordinate with a nonzero entry, 0 for the zero index.
    int max_coordinate() const noexcept;
    const std::map<int, int>& support() const noexcept { return entries_; }

    /// Componentwise m <= *this.
    bool dominates(const MultiIndex& m) const;
    /// Product of binomial coefficients nu_j choose m_j.
    double binomial(const MultiIndex& m) const;
    /// b^nu = prod b_j^{nu_j}; b[0] is b_1.
    double power(std::span<const double> b) const;

    /// All m <= *this, in lexicographic order of the dense representation.
    std::vector<MultiIndex> sub_indices() const;

    MultiIndex operator-(const MultiIndex& m) const;
    bool operator==(const MultiIndex&) const = default;
    auto operator<=>(const MultiIndex& other) const { return entries_ <=> other.entries_; }

private:
    std::map<int, int> entries_;
    int order_ = 0;
};

/// Gevrey exponent sigma >= 1 and the constants C (derivative bound) and C0
/// (base case) of the abstract recurrence.
struct GevreyParams {
    double sigma = 1.0;
    double C = 1.0;
    double C0 = 1.0;

    void validate() const;
};

enum class Recursion {
    /// The recurrence taken with equality, Upsilon_0 = C0.
    equality,
    /// An admissible sequence with strict inequality at the base,
    /// Upsilon_0 = C0 / 2, propagated with the equality recursion.
    inequality,
};

/// Upsilon_nu = C * sum_{0 != m <= nu} binom(nu, m) (|m|!)^sigma b^m Upsilon_{nu - m},
/// memoized over the sub-indices of nu. Throws DomainError when |nu| > max_order.
double recurrence_upsilon(const MultiIndex& nu, const GevreyParams& p, std::span<const double> b,
                          Recursion mode = Recursion::equality, int max_order = 8);

/// C0 a_{|nu|} (|nu|!)^sigma b^nu with a_k = C^{1 - delta_{k0}} (C + 1)^{max(k - 1, 0)}.
double closed_form_bound(const MultiIndex& nu, const GevreyParams& p, std::span<const double> b);

/// (f_norm / a_min) C (C + 1)^{|nu| - 1} (|nu|!)^sigma b^nu, the bound on the
/// H^1_0 norm of the nu-th parametric derivative of the PDE solution.
double solution_derivative_bound(const MultiIndex& nu, const GevreyParams& p, std::span<const double> b,
                                 double f_norm, double a_min);

/// (e/2)^sigma (|nu|!)^sigma prod_j (2^sigma C_xi ||psi_j||)^{nu_j}. Valid for
/// nu <= 1 componentwise; pass linear_h = true for a field whose inner link is
/// the identity, where every nu is admissible.
double appendix_bound(const MultiIndex& nu, double sigma, double C_xi, std::span<const double> psi_sup_norms,
                      bool linear_h = false);

/// A scalar field a(x, y) over spatial points x in D and parameter vectors y.
using ParametricField = std::function<double(const Eigen::Vector2d&, std::span<const double>)>;

/// Central-difference estimate of max_x |d^nu a(x, y) / a(x, y)| over the
/// given spatial points (one per row), with one Richardson step (h, h/2).
/// Requires |nu| <= 3 and nu supported within y.
double gevrey_ratio_fd(const ParametricField& field, std::span<const double> y, const MultiIndex& nu,
                       const Eigen::Matrix<double, Eigen::Dynamic, 2>& spatial_grid, double step = 1e-3);

}  // namespace gevqmc

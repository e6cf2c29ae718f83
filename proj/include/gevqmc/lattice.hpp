#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gevqmc/weights.hpp"

namespace gevqmc {

/// Rank-1 lattice {i z / n}, i = 1..n, with prime n.
struct GeneratingVector {
    std::int64_t n = 0;
    std::vector<std::int64_t> z;

    int s() const noexcept { return static_cast<int>(z.size()); }
    /// Throws DomainError unless n is prime and 1 <= z_j <= n - 1.
    void validate() const;
};

/// R random shifts in [0, 1)^s, one per row.
struct ShiftSet {
    Eigen::MatrixXd shifts;
    std::uint64_t seed = 0;

    int count() const noexcept { return static_cast<int>(shifts.rows()); }
    int s() const noexcept { return static_cast<int>(shifts.cols()); }

    /// Shift r, coordinate j is a pure function of (seed, r, j), so a shift set
    /// for dimension s is the leading block of the one for any s' > s.
    static ShiftSet generate(int R, int s, std::uint64_t seed);
    static ShiftSet zero(int s);
};

bool is_prime(std::int64_t n);
std::int64_t euler_totient(std::int64_t n);
/// Smallest generator of the multiplicative group of Z_n, n an odd prime (or 2).
std::int64_t primitive_root(std::int64_t n);

/// frac(i z / n + shift), componentwise. Requires 1 <= i <= n.
Eigen::VectorXd lattice_point(const GeneratingVector& g, std::int64_t i, std::span<const double> shift);
/// Same, writing into `out` (size s) without allocating.
void lattice_point(const GeneratingVector& g, std::int64_t i, std::span<const double> shift, std::span<double> out);

/// One-dimensional kernel omega sampled at k / n, k = 0..n-1, used by the CBC
/// error criterion.
struct KernelTable {
    enum class Mode { surrogate, table };
    Mode mode = Mode::surrogate;
    std::vector<double> values;
    std::string source;  // file the table was read from, empty for the surrogate

    /// omega(x) = x^2 - x + 1/6, the degree-2 Bernoulli polynomial.
    static KernelTable surrogate(std::int64_t n);
    static KernelTable custom(std::vector<double> values, std::string source = {});
    std::string describe() const;
};

/// Order cap for the POD accumulators; higher orders are dropped.
inline constexpr int kMaxPodOrder = 60;

/// Shift-averaged squared worst-case error criterion of the first j
/// coordinates of g:
///   E_j^2 = sum_{0 != u subset {1:j}} gamma_u (1/n) sum_{k=0}^{n-1} prod_{m in u} omega(k z_m mod n / n).
double wce_criterion(const GeneratingVector& g, const PodWeights& w, const KernelTable& kernel, int j);

struct CbcResult {
    GeneratingVector vector;
    /// E_j^2 after committing z_j, j = 1..s.
    std::vector<double> criterion;
    bool order_truncated = false;
};

/// Fast component-by-component construction for POD weights and prime n:
/// z_j minimizes E_j^2 given z_1..z_{j-1}, the candidate scan done as one
/// circulant product of length n - 1 (FFT) per component. Ties (values equal
/// up to rounding) go to the smallest z_j.
CbcResult cbc_construct(std::int64_t n, int s, const PodWeights& w, const KernelTable& kernel);

/// Relative window within which two criterion values count as tied.
inline constexpr double kCbcTieTolerance = 1e-10;

struct QmcEstimate {
    std::vector<double> per_shift;
    double mean = 0.0;
    /// sqrt(sum_r (mean - Q_r)^2 / (R (R - 1))); zero when R < 2.
    double rms_error = 0.0;
};

/// Randomly shifted lattice rule for F over [0, 1)^s. Per-shift means are
/// reduced in a fixed order, so results do not depend on `threads`.
QmcEstimate qmc_estimate(const std::function<double(std::span<const double>)>& F, const GeneratingVector& g,
                         const ShiftSet& shifts, int threads = 1);

/// Generating-vector file: line 1 "n s", then s lines with z_j.
void write_generating_vector(std::ostream& os, const GeneratingVector& g);
GeneratingVector read_generating_vector(std::istream& is);
/// Shift file: R lines of s space-separated reals.
void write_shifts(std::ostream& os, const ShiftSet& shifts);
ShiftSet read_shifts(std::istream& is);
/// Kernel table file: n values omega(k/n), one per line.
KernelTable read_kernel_table(std::istream& is, std::string source = {});

}  // namespace gevqmc

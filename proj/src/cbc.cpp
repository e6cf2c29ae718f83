#define EIGEN_FFTW_DEFAULT
#include <complex>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/FFT>

#include "gevqmc/errors.hpp"
#include "gevqmc/lattice.hpp"

namespace gevqmc {

CbcResult cbc_construct(std::int64_t n, int s, const PodWeights& w, const KernelTable& kernel) {
    if (!is_prime(n)) throw DomainError("cbc_construct: n = " + std::to_string(n) + " is not prime");
    if (s < 1) throw DomainError("cbc_construct: s must be >= 1");
    if (w.max_dimension() < s) throw DomainError("cbc_construct: weights cover fewer than s coordinates");
    if (static_cast<std::int64_t>(kernel.values.size()) != n)
        throw DomainError("cbc_construct: kernel table must have n entries");

    CbcResult result;
    result.vector.n = n;
    result.vector.z.reserve(s);
    result.criterion.reserve(s);
    result.order_truncated = s > kMaxPodOrder;

    const std::vector<double>& omega = kernel.values;
    const int orders = std::min(s, kMaxPodOrder);
    const double kappa = w.exponent() * w.sigma();

    // acc[l][k] = Gamma_l * sum_{|u| = l, u in {1:j-1}} prod_{m in u} gamma_m omega(k z_m mod n / n)
    std::vector<std::vector<double>> acc(orders + 1, std::vector<double>(n, 0.0));
    std::fill(acc[0].begin(), acc[0].end(), 1.0);

    // Index the nonzero residues by powers of a primitive root, so that
    // k z = g^(a+b) turns the candidate scan into a circular correlation.
    const std::int64_t m = n - 1;
    std::vector<std::int64_t> power(m);
    const std::int64_t root = primitive_root(n);
    power[0] = 1;
    for (std::int64_t b = 1; b < m; ++b) power[b] = static_cast<std::int64_t>((static_cast<__int128>(power[b - 1]) * root) % n);

    Eigen::FFT<double> fft;
    std::vector<double> omega_perm(m);
    for (std::int64_t c = 0; c < m; ++c) omega_perm[c] = omega[power[c]];
    std::vector<std::complex<double>> omega_hat;
    fft.fwd(omega_hat, omega_perm);

    std::vector<double> v(n), v_perm(m), corr(m), candidate(m);
    std::vector<std::complex<double>> v_hat, prod(m);
    double previous = 0.0;

    for (int j = 1; j <= s; ++j) {
        const double gamma_j = w.product_weight(j);
        const int top = std::min(j, orders);
        for (std::int64_t k = 0; k < n; ++k) {
            double vk = 0.0;
            for (int l = 1; l <= top; ++l) vk += std::pow(static_cast<double>(l), kappa) * acc[l - 1][k];
            v[k] = vk;
        }

        // corr[a] = sum_b omega(g^(a+b)) v(g^b)
        if (m > 1) {
            for (std::int64_t b = 0; b < m; ++b) v_perm[b] = v[power[b]];
            fft.fwd(v_hat, v_perm);
            for (std::int64_t f = 0; f < m; ++f) prod[f] = omega_hat[f] * std::conj(v_hat[f]);
            fft.inv(corr, prod);
        } else {
            corr[0] = omega[1] * v[1];
        }

        const double inv_n = 1.0 / static_cast<double>(n);
        double best = std::numeric_limits<double>::infinity();
        double largest = 0.0;
        for (std::int64_t a = 0; a < m; ++a) {
            candidate[a] = previous + gamma_j * (omega[0] * v[0] + corr[a]) * inv_n;
            best = std::min(best, candidate[a]);
            largest = std::max(largest, std::abs(candidate[a]));
        }
        const double window = kCbcTieTolerance * largest;
        std::int64_t chosen = n;
        double chosen_value = best;
        for (std::int64_t a = 0; a < m; ++a) {
            if (candidate[a] <= best + window && power[a] < chosen) {
                chosen = power[a];
                chosen_value = candidate[a];
            }
        }

        result.vector.z.push_back(chosen);
        result.criterion.push_back(chosen_value);
        previous = chosen_value;

        for (int l = top; l >= 1; --l) {
            const double step = gamma_j * std::pow(static_cast<double>(l), kappa);
            auto& dst = acc[l];
            const auto& src = acc[l - 1];
            for (std::int64_t k = 0; k < n; ++k)
                dst[k] += step * omega[static_cast<std::int64_t>((static_cast<__int128>(k) * chosen) % n)] * src[k];
        }
    }
    return result;
}

}  // namespace gevqmc

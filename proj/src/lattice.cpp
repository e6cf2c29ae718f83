#include "gevqmc/lattice.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "gevqmc/errors.hpp"
#include "gevqmc/parallel.hpp"

namespace gevqmc {

void GeneratingVector::validate() const {
    if (!is_prime(n)) throw DomainError("generating vector: n = " + std::to_string(n) + " is not prime");
    for (std::size_t j = 0; j < z.size(); ++j)
        if (z[j] < 1 || z[j] > n - 1)
            throw DomainError("generating vector: z_" + std::to_string(j + 1) + " outside {1, ..., n-1}");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t r, std::uint64_t j) {
    const std::uint64_t key = splitmix64(splitmix64(seed) ^ splitmix64(r * 0xD1B54A32D192ED03ULL + 1));
    const std::uint64_t bits = splitmix64(key ^ splitmix64(j * 0xABC98388FB8FAC03ULL + 2));
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t n) {
    return static_cast<std::int64_t>((static_cast<__int128>(a) * b) % n);
}

std::int64_t pow_mod(std::int64_t base, std::int64_t e, std::int64_t n) {
    std::int64_t result = 1 % n;
    base %= n;
    while (e > 0) {
        if (e & 1) result = mul_mod(result, base, n);
        base = mul_mod(base, base, n);
        e >>= 1;
    }
    return result;
}

std::vector<std::int64_t> prime_factors(std::int64_t n) {
    std::vector<std::int64_t> out;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        out.push_back(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1) out.push_back(n);
    return out;
}

}  // namespace

ShiftSet ShiftSet::generate(int R, int s, std::uint64_t seed) {
    if (R < 1 || s < 1) throw DomainError("ShiftSet: need R >= 1 and s >= 1");
    ShiftSet set;
    set.seed = seed;
    set.shifts.resize(R, s);
    for (int r = 0; r < R; ++r)
        for (int j = 0; j < s; ++j) set.shifts(r, j) = counter_uniform(seed, r, j);
    return set;
}

ShiftSet ShiftSet::zero(int s) {
    ShiftSet set;
    set.shifts = Eigen::MatrixXd::Zero(1, s);
    return set;
}

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::int64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

std::int64_t euler_totient(std::int64_t n) {
    if (n < 1) throw DomainError("euler_totient: n must be >= 1");
    std::int64_t result = n;
    for (std::int64_t p : prime_factors(n)) result -= result / p;
    return result;
}

std::int64_t primitive_root(std::int64_t n) {
    if (!is_prime(n)) throw DomainError("primitive_root: n must be prime");
    if (n == 2) return 1;
    const auto factors = prime_factors(n - 1);
    for (std::int64_t g = 2; g < n; ++g) {
        bool generator = true;
        for (std::int64_t q : factors)
            if (pow_mod(g, (n - 1) / q, n) == 1) {
                generator = false;
                break;
            }
        if (generator) return g;
    }
    throw NumericalError("primitive_root: none found");
}

void lattice_point(const GeneratingVector& g, std::int64_t i, std::span<const double> shift, std::span<double> out) {
    if (i < 1 || i > g.n) throw DomainError("lattice_point: need 1 <= i <= n");
    if (shift.size() != g.z.size() || out.size() != g.z.size())
        throw DomainError("lattice_point: shift/output length must equal s");
    const double inv_n = 1.0 / static_cast<double>(g.n);
    for (std::size_t j = 0; j < g.z.size(); ++j) {
        const double x = static_cast<double>(mul_mod(i, g.z[j], g.n)) * inv_n + shift[j];
        out[j] = x - std::floor(x);
    }
}

Eigen::VectorXd lattice_point(const GeneratingVector& g, std::int64_t i, std::span<const double> shift) {
    Eigen::VectorXd out(g.s());
    lattice_point(g, i, shift, std::span<double>(out.data(), out.size()));
    return out;
}

KernelTable KernelTable::surrogate(std::int64_t n) {
    if (n < 1) throw DomainError("KernelTable: n must be positive");
    KernelTable table;
    table.mode = Mode::surrogate;
    table.values.resize(n);
    for (std::int64_t k = 0; k < n; ++k) {
        const double x = static_cast<double>(k) / static_cast<double>(n);
        table.values[k] = x * x - x + 1.0 / 6.0;
    }
    return table;
}

KernelTable KernelTable::custom(std::vector<double> values, std::string source) {
    KernelTable table;
    table.mode = Mode::table;
    table.values = std::move(values);
    table.source = std::move(source);
    return table;
}

std::string KernelTable::describe() const {
    return mode == Mode::surrogate ? std::string("surrogate") : "table:" + source;
}

double wce_criterion(const GeneratingVector& g, const PodWeights& w, const KernelTable& kernel, int j) {
    if (j < 0 || j > g.s()) throw DomainError("wce_criterion: j out of range");
    if (j > w.max_dimension()) throw DomainError("wce_criterion: weights too short");
    if (static_cast<std::int64_t>(kernel.values.size()) != g.n)
        throw DomainError("wce_criterion: kernel table must have n entries");
    const std::int64_t n = g.n;
    const int orders = std::min(j, kMaxPodOrder);
    const double kappa = w.exponent() * w.sigma();
    // acc[l][k] = Gamma_l * sum_{|u| = l} prod_{m in u} gamma_m omega(k z_m mod n / n)
    std::vector<std::vector<double>> acc(orders + 1, std::vector<double>(n, 0.0));
    std::fill(acc[0].begin(), acc[0].end(), 1.0);
    for (int m = 1; m <= j; ++m) {
        const double gamma_m = w.product_weight(m);
        const std::int64_t zm = g.z[m - 1];
        for (int l = std::min(m, orders); l >= 1; --l) {
            const double step = gamma_m * std::pow(static_cast<double>(l), kappa);
            for (std::int64_t k = 0; k < n; ++k)
                acc[l][k] += step * kernel.values[mul_mod(k, zm, n)] * acc[l - 1][k];
        }
    }
    double total = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
        double at_k = 0.0;
        for (int l = 1; l <= orders; ++l) at_k += acc[l][k];
        total += at_k;
    }
    return total / static_cast<double>(n);
}

QmcEstimate qmc_estimate(const std::function<double(std::span<const double>)>& F, const GeneratingVector& g,
                         const ShiftSet& shifts, int threads) {
    g.validate();
    if (shifts.s() != g.s()) throw DomainError("qmc_estimate: shift dimension must equal s");
    const int R = shifts.count();
    QmcEstimate est;
    est.per_shift.resize(R);
    for (int r = 0; r < R; ++r) {
        const Eigen::VectorXd shift = shifts.shifts.row(r).transpose();
        const double sum = ordered_sum(static_cast<std::size_t>(g.n), threads, 0.0, [&](std::size_t i, int) {
            std::vector<double> point(g.s());
            lattice_point(g, static_cast<std::int64_t>(i) + 1, std::span<const double>(shift.data(), shift.size()),
                          point);
            return F(point);
        });
        est.per_shift[r] = sum / static_cast<double>(g.n);
    }
    double mean = 0.0;
    for (double q : est.per_shift) mean += q;
    est.mean = mean / R;
    if (R >= 2) {
        double ss = 0.0;
        for (double q : est.per_shift) ss += (est.mean - q) * (est.mean - q);
        est.rms_error = std::sqrt(ss / (static_cast<double>(R) * (R - 1)));
    }
    return est;
}

void write_generating_vector(std::ostream& os, const GeneratingVector& g) {
    os << g.n << ' ' << g.s() << '\n';
    for (std::int64_t zj : g.z) os << zj << '\n';
}

namespace {

bool next_data_line(std::istream& is, std::string& line) {
    while (std::getline(is, line))
        if (!line.empty() && line.front() != '#') return true;
    return false;
}

}  // namespace

GeneratingVector read_generating_vector(std::istream& is) {
    std::string line;
    if (!next_data_line(is, line)) throw ConfigError("generating vector file: empty");
    GeneratingVector g;
    int s = 0;
    std::istringstream header(line);
    if (!(header >> g.n >> s) || s < 1) throw ConfigError("generating vector file: malformed header");
    g.z.reserve(s);
    for (int j = 0; j < s; ++j) {
        std::int64_t zj;
        if (!next_data_line(is, line) || !(std::istringstream(line) >> zj))
            throw ConfigError("generating vector file: expected " + std::to_string(s) + " entries");
        g.z.push_back(zj);
    }
    g.validate();
    return g;
}

void write_shifts(std::ostream& os, const ShiftSet& shifts) {
    os.precision(17);
    for (int r = 0; r < shifts.count(); ++r) {
        for (int j = 0; j < shifts.s(); ++j) os << (j ? " " : "") << shifts.shifts(r, j);
        os << '\n';
    }
}

ShiftSet read_shifts(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (next_data_line(is, line)) {
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) {
            if (!(v >= 0.0 && v < 1.0)) throw ConfigError("shift file: entries must lie in [0, 1)");
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ConfigError("shift file: rows have different lengths");
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().empty()) throw ConfigError("shift file: no shifts");
    ShiftSet set;
    set.shifts.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t j = 0; j < rows[r].size(); ++j) set.shifts(r, j) = rows[r][j];
    return set;
}

KernelTable read_kernel_table(std::istream& is, std::string source) {
    std::vector<double> values;
    std::string line;
    while (next_data_line(is, line)) {
        double v;
        if (!(std::istringstream(line) >> v)) throw ConfigError("kernel table: malformed line '" + line + "'");
        values.push_back(v);
    }
    if (values.empty()) throw ConfigError("kernel table: empty");
    return KernelTable::custom(std::move(values), std::move(source));
}

}  // namespace gevqmc

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "gevqmc/errors.hpp"
#include "gevqmc/field.hpp"
#include "gevqmc/lattice.hpp"
#include "gevqmc/weights.hpp"
#include "oracles.hpp"

using namespace gevqmc;

namespace {

PodWeights experiment_weights(int s, double vartheta = 1.75) {
    GevreyField f;
    f.vartheta = vartheta;
    const CoordinateSequences seq = coordinate_sequences(f, s);
    SpaceParams sp;
    const double K = kernel_constant_K(sp);
    return build_pod_weights(s, f.sigma, select_lambda(seq.p, f.sigma, sp), 1.0, seq.b, seq.alpha, sp, K);
}

}  // namespace

TEST_CASE("primes, totient, primitive roots") {
    for (std::int64_t n = 0; n < 2000; ++n) CHECK(is_prime(n) == oracle::trial_division_prime(n));
    CHECK(is_prime(63997));
    CHECK(euler_totient(17) == 16);
    CHECK(euler_totient(1) == 1);
    CHECK(euler_totient(63997) == 63996);
    CHECK(euler_totient(36) == 12);
    for (std::int64_t n : {3, 5, 17, 31, 2003, 63997}) {
        const std::int64_t g = primitive_root(n);
        std::set<std::int64_t> seen;
        std::int64_t x = 1;
        for (std::int64_t k = 0; k < n - 1; ++k) {
            seen.insert(x);
            x = x * g % n;
        }
        CHECK(seen.size() == static_cast<std::size_t>(n - 1));
    }
    CHECK_THROWS_AS(primitive_root(15), DomainError);
}

TEST_CASE("lattice points") {
    const GeneratingVector g{4, {1, 1}};
    const std::vector<double> zero2{0.0, 0.0};
    const auto p = lattice_point(g, 2, zero2);
    CHECK(p[0] == 0.5);
    CHECK(p[1] == 0.5);
    const GeneratingVector g5{5, {1, 3}};
    const auto q = lattice_point(g5, 2, std::vector<double>{0.1, 0.1});
    CHECK(q[0] == doctest::Approx(0.5));
    CHECK(q[1] == doctest::Approx(0.3));
    const auto last = lattice_point(g5, 5, zero2);
    CHECK(last[0] == 0.0);
    CHECK(last[1] == 0.0);
    CHECK_THROWS_AS(lattice_point(g5, 0, zero2), DomainError);
    CHECK_THROWS_AS(lattice_point(g5, 6, zero2), DomainError);
    CHECK_THROWS_AS(lattice_point(g5, 1, std::vector<double>{0.0}), DomainError);
    // closure under addition mod 1
    const GeneratingVector g17{17, {1, 5, 7}};
    const std::vector<double> zero3(3, 0.0);
    for (int a = 1; a <= 17; ++a)
        for (int b = 1; b <= 17; ++b) {
            const auto pa = lattice_point(g17, a, zero3), pb = lattice_point(g17, b, zero3);
            const auto pc = lattice_point(g17, (a + b - 1) % 17 + 1, zero3);
            for (int j = 0; j < 3; ++j) {
                const double sum = pa[j] + pb[j];
                CHECK(std::abs((sum - std::floor(sum)) - pc[j]) < 1e-12);
            }
        }
}

TEST_CASE("generating vector validation") {
    CHECK_THROWS_AS((GeneratingVector{15, {1}}.validate()), DomainError);
    CHECK_THROWS_AS((GeneratingVector{17, {0}}.validate()), DomainError);
    CHECK_THROWS_AS((GeneratingVector{17, {17}}.validate()), DomainError);
    CHECK_NOTHROW((GeneratingVector{17, {1, 16}}.validate()));
}

TEST_CASE("shifts are seeded and in range") {
    const ShiftSet a = ShiftSet::generate(16, 10, 42);
    const ShiftSet b = ShiftSet::generate(16, 10, 42);
    const ShiftSet c = ShiftSet::generate(16, 10, 43);
    CHECK(a.shifts == b.shifts);
    CHECK(a.shifts != c.shifts);
    CHECK(a.shifts.minCoeff() >= 0.0);
    CHECK(a.shifts.maxCoeff() < 1.0);
    // shift r, coordinate j does not depend on the total counts
    const ShiftSet d = ShiftSet::generate(4, 3, 42);
    CHECK(d.shifts == a.shifts.topLeftCorner(4, 3));
    std::stringstream ss;
    write_shifts(ss, a);
    const ShiftSet back = read_shifts(ss);
    CHECK(back.shifts == a.shifts);
}

TEST_CASE("wce criterion against subset enumeration") {
    const PodWeights w = experiment_weights(4);
    for (std::int64_t n : {17, 31}) {
        const KernelTable kernel = KernelTable::surrogate(n);
        const GeneratingVector g{n, {1, 7, 3, 11}};
        for (int j = 1; j <= 4; ++j) {
            const double naive =
                oracle::naive_criterion(n, g.z, j, kernel.values, w.per_coord_factor(), w.sigma(), w.exponent());
            CHECK(wce_criterion(g, w, kernel, j) == doctest::Approx(naive).epsilon(1e-13));
        }
    }
    // simple values
    const GeneratingVector g5{5, {2}};
    const PodWeights unit(0.0, 1.0, {1.0});
    CHECK(wce_criterion(g5, unit, KernelTable::custom(std::vector<double>(5, 1.0)), 1) == doctest::Approx(1.0));
    const PodWeights zero(1.5, 0.7, {0.0, 0.0});
    CHECK(wce_criterion(GeneratingVector{17, {1, 3}}, zero, KernelTable::surrogate(17), 2) == 0.0);
    CHECK(wce_criterion(GeneratingVector{17, {1, 3}}, zero, KernelTable::surrogate(17), 0) == 0.0);
}

TEST_CASE("fast CBC equals the naive greedy construction") {
    for (std::int64_t n : {17, 31, 67}) {
        const int s = 6;
        const PodWeights w = experiment_weights(s, n == 31 ? 2.0 : 1.75);
        const KernelTable kernel = KernelTable::surrogate(n);
        const CbcResult fast = cbc_construct(n, s, w, kernel);
        const auto naive = oracle::naive_cbc(n, s, kernel.values, w.per_coord_factor(), w.sigma(), w.exponent());
        CHECK(fast.vector.z == naive);
        for (int j = 1; j <= s; ++j)
            CHECK(fast.criterion[j - 1] == doctest::Approx(wce_criterion(fast.vector, w, kernel, j)).epsilon(1e-12));
    }
    // product weights: sigma = 0
    const PodWeights product(0.0, 0.8, {0.9, 0.5, 0.3});
    const KernelTable k31 = KernelTable::surrogate(31);
    CHECK(cbc_construct(31, 3, product, k31).vector.z ==
          oracle::naive_cbc(31, 3, k31.values, product.per_coord_factor(), 0.0, product.exponent()));
}

TEST_CASE("CBC per-step optimality") {
    for (std::int64_t n : {17, 31}) {
        const PodWeights w = experiment_weights(4);
        const KernelTable kernel = KernelTable::surrogate(n);
        const CbcResult res = cbc_construct(n, 4, w, kernel);
        for (int j = 1; j <= 4; ++j) {
            GeneratingVector trial{n, std::vector<std::int64_t>(res.vector.z.begin(), res.vector.z.begin() + j)};
            const double chosen = wce_criterion(trial, w, kernel, j);
            for (std::int64_t c = 1; c < n; ++c) {
                trial.z[j - 1] = c;
                CHECK(wce_criterion(trial, w, kernel, j) >= chosen * (1 - 1e-10));
            }
        }
    }
}

TEST_CASE("CBC edge cases") {
    const PodWeights w = experiment_weights(3);
    // dimension 1: the surrogate kernel makes every candidate equivalent
    CHECK(cbc_construct(31, 1, w, KernelTable::surrogate(31)).vector.z == std::vector<std::int64_t>{1});
    CHECK(cbc_construct(2, 3, w, KernelTable::surrogate(2)).vector.z == std::vector<std::int64_t>{1, 1, 1});
    CHECK_THROWS_AS(cbc_construct(21, 2, w, KernelTable::surrogate(21)), DomainError);
    CHECK_THROWS_AS(cbc_construct(17, 0, w, KernelTable::surrogate(17)), DomainError);
    CHECK_THROWS_AS(cbc_construct(17, 4, w, KernelTable::surrogate(17)), DomainError);
    CHECK_THROWS_AS(cbc_construct(17, 2, w, KernelTable::surrogate(19)), DomainError);
    const PodWeights many = experiment_weights(70);
    const CbcResult big = cbc_construct(101, 70, many, KernelTable::surrogate(101));
    CHECK(big.order_truncated);
    CHECK(big.vector.s() == 70);
    CHECK(std::isfinite(big.criterion.back()));
}

TEST_CASE("CBC is a prefix in the dimension") {
    const PodWeights w = experiment_weights(12);
    const KernelTable kernel = KernelTable::surrogate(263);
    const auto a = cbc_construct(263, 12, w, kernel).vector.z;
    const auto b = cbc_construct(263, 7, w, kernel).vector.z;
    CHECK(std::vector<std::int64_t>(a.begin(), a.begin() + 7) == b);
}

TEST_CASE("QMC estimates") {
    const GeneratingVector g5{5, {1}};
    const auto est = qmc_estimate([](std::span<const double> x) { return x[0]; }, g5, ShiftSet::zero(1));
    CHECK(est.mean == doctest::Approx(0.4));
    CHECK(est.rms_error == 0.0);

    const ShiftSet shifts = ShiftSet::generate(8, 3, 1);
    const GeneratingVector g{31, {1, 12, 7}};
    const auto c = qmc_estimate([](std::span<const double>) { return 2.5; }, g, shifts);
    CHECK(c.mean == 2.5);
    CHECK(c.rms_error == 0.0);

    double prev = 1.0;
    for (std::int64_t n : {17, 67, 257}) {
        const PodWeights w(0.0, 1.0, {1.0, 1.0});
        const GeneratingVector gv = n == 257 ? cbc_construct(n, 2, w, KernelTable::surrogate(n)).vector
                                             : cbc_construct(n, 2, w, KernelTable::surrogate(n)).vector;
        const auto e = qmc_estimate([](std::span<const double> x) { return x[0] * x[1]; }, gv, ShiftSet::zero(2));
        const double err = std::abs(e.mean - 0.25);
        CHECK(err < prev);
        prev = err;
    }

    const ShiftSet many = ShiftSet::generate(64, 1, 9);
    const auto m = qmc_estimate([](std::span<const double> x) { return x[0]; }, GeneratingVector{17, {1}}, many);
    CHECK(std::abs(m.mean - 0.5) < 3.0 * m.rms_error);

    // threads do not change anything
    const auto f = [](std::span<const double> x) { return std::exp(x[0] - x[1] * x[2]); };
    const GeneratingVector big = cbc_construct(1013, 3, experiment_weights(3), KernelTable::surrogate(1013)).vector;
    const auto one = qmc_estimate(f, big, shifts, 1);
    const auto four = qmc_estimate(f, big, shifts, 4);
    CHECK(one.per_shift == four.per_shift);
    CHECK(one.rms_error == four.rms_error);
}

TEST_CASE("file formats") {
    const GeneratingVector g{31, {1, 12, 7}};
    std::stringstream ss;
    ss << "# comment\n";
    write_generating_vector(ss, g);
    const GeneratingVector back = read_generating_vector(ss);
    CHECK(back.n == 31);
    CHECK(back.z == g.z);
    std::istringstream bad("31 3\n1\n2\n");
    CHECK_THROWS_AS(read_generating_vector(bad), ConfigError);
    std::istringstream composite("33 1\n1\n");
    CHECK_THROWS(read_generating_vector(composite));
    std::istringstream table("0.1\n# x\n0.2\n0.3\n");
    const KernelTable k = read_kernel_table(table, "t");
    CHECK(k.values.size() == 3);
    CHECK(k.describe() == "table:t");
    CHECK(KernelTable::surrogate(5).describe() == "surrogate");
    std::istringstream shifts_bad("0.1 1.5\n");
    CHECK_THROWS_AS(read_shifts(shifts_bad), ConfigError);
}

#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "gevqmc/betagauss.hpp"
#include "gevqmc/errors.hpp"

using namespace gevqmc;

namespace {

// Half-line integral by double-exponential quadrature, doubled by symmetry.
template <class F>
double symmetric_integral(F f) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return 2.0 * integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

}  // namespace

TEST_CASE("density values") {
    CHECK(BetaGaussian(2.0).density(0.0) == doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi)).epsilon(1e-15));
    CHECK(BetaGaussian(1.0).density(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    const double c_half = std::exp(-std::log(2.0) - 2.0 * std::log(0.5) - std::lgamma(3.0));
    CHECK(BetaGaussian(0.5).c_beta() == doctest::Approx(c_half).epsilon(1e-14));
    CHECK(BetaGaussian(0.5).density(1.0) == doctest::Approx(c_half * std::exp(-2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(BetaGaussian(0.0), DomainError);
    CHECK_THROWS_AS(BetaGaussian(-1.0), DomainError);
}

TEST_CASE("density symmetric and maximal at zero") {
    for (double beta : {0.5, 1.0, 2.0, 4.0}) {
        const BetaGaussian d(beta);
        for (double y : {0.1, 0.7, 2.0, 5.0}) {
            CHECK(d.density(y) == d.density(-y));
            CHECK(d.density(y) < d.density(0.0));
        }
    }
}

TEST_CASE("density integrates to one") {
    for (double beta : {0.5, 1.0, 2.0, 4.0}) {
        const BetaGaussian d(beta);
        CHECK(symmetric_integral([&](double y) { return d.density(y); }) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("cdf") {
    const BetaGaussian n(2.0);
    CHECK(n.cdf(0.0) == 0.5);
    CHECK(n.cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    boost::math::quadrature::tanh_sinh<double> ts;
    const double q = 0.5 + ts.integrate([&](double y) { return n.density(y); }, 0.0, 1.959964);
    CHECK(n.cdf(1.959964) == doctest::Approx(q).epsilon(1e-12));
    for (double beta : {0.5, 1.0, 2.0, 4.0}) {
        const BetaGaussian d(beta);
        double prev = -1.0;
        for (int i = 0; i <= 10000; ++i) {
            const double y = -8.0 + 16.0 * i / 10000.0;
            const double c = d.cdf(y);
            CHECK(c + d.cdf(-y) == doctest::Approx(1.0).epsilon(1e-12));
            // the upper half saturates to 1 in double, so only the lower half is strict
            if (y <= 0.0 && y > -4.0) CHECK(c > prev);
            CHECK(c >= prev);
            prev = c;
        }
    }
}

TEST_CASE("inverse cdf") {
    CHECK(BetaGaussian(2.0).inv_cdf(0.5) == 0.0);
    CHECK(BetaGaussian(2.0).inv_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    // |w|^beta / beta = Q^{-1}(1/beta, 2t)
    const double w = BetaGaussian(0.5).inv_cdf(0.01);
    CHECK(w < 0.0);
    CHECK(std::sqrt(std::abs(w)) / 0.5 == doctest::Approx(boost::math::gamma_q_inv(2.0, 0.02)).epsilon(1e-12));
    for (double beta : {0.5, 1.0, 2.0, 4.0}) {
        const BetaGaussian d(beta);
        for (int i = 0; i <= 1000; ++i) {
            const double t = 1e-12 + (1.0 - 2e-12) * i / 1000.0;
            CHECK(std::abs(d.cdf(d.inv_cdf(t)) - t) <= 1e-10);
        }
        for (int i = 1; i < 1024; ++i) {
            const double t = i / 1024.0;  // 1 - t is exact
            CHECK(d.inv_cdf(t) == doctest::Approx(-d.inv_cdf(1.0 - t)).epsilon(1e-9));
        }
        CHECK(std::isfinite(d.inv_cdf(1e-320)));
        CHECK(std::isfinite(d.inv_cdf(std::nextafter(1.0, 0.0))));
        CHECK_THROWS_AS(d.inv_cdf(0.0), DomainError);
        CHECK_THROWS_AS(d.inv_cdf(1.0), DomainError);
        CHECK_THROWS_AS(d.inv_cdf(1.5), DomainError);
    }
}

TEST_CASE("absolute moments") {
    for (double beta : {0.5, 1.0, 2.0, 4.0, 7.3}) CHECK(BetaGaussian(beta).abs_moment(beta) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(BetaGaussian(2.0).abs_moment(1.0) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-14));
    CHECK(BetaGaussian(2.0).abs_moment(2.0) == doctest::Approx(1.0).epsilon(1e-15));
    for (double beta : {0.5, 1.0, 2.0, 4.0}) {
        const BetaGaussian d(beta);
        for (double tau : {0.3, 1.0, 2.5}) {
            const double q = symmetric_integral([&](double y) { return std::pow(y, tau) * d.density(y); });
            CHECK(d.abs_moment(tau) == doctest::Approx(q).epsilon(1e-10));
        }
    }
}

TEST_CASE("exponential moments") {
    for (double beta : {0.5, 1.0, 2.0}) {
        const BetaGaussian d(beta);
        CHECK(d.exp_moment(0.0, beta, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(BetaGaussian(2.0).exp_moment(0.0, 1.0, 2) == doctest::Approx(1.0).epsilon(1e-12));
    const BetaGaussian d(0.5);
    const double v = d.exp_moment(0.5, 0.5, 1);
    const double ref =
        symmetric_integral([&](double y) { return y * d.c_beta() * std::exp(0.5 * std::sqrt(y) - 2.0 * std::sqrt(y)); });
    CHECK(std::isfinite(v));
    CHECK(v == doctest::Approx(ref).epsilon(1e-10));
    // tau < beta: every alpha is admissible
    const BetaGaussian g(2.0);
    const double ref2 = symmetric_integral([&](double y) { return y * y * g.density(0.0) * std::exp(3.0 * y - 0.5 * y * y); });
    CHECK(g.exp_moment(3.0, 1.0, 2) == doctest::Approx(ref2).epsilon(1e-10));
    double prev = 0.0;
    for (double alpha : {0.0, 0.2, 0.5, 1.0, 1.5, 1.9}) {
        const double m = d.exp_moment(alpha, 0.5, 2);
        CHECK(m > prev);
        prev = m;
    }
    CHECK_THROWS_AS(d.exp_moment(2.0, 0.5, 0), DomainError);
    CHECK_THROWS_AS(d.exp_moment(2.5, 0.5, 0), DomainError);
    CHECK_THROWS_AS(d.exp_moment(0.1, 0.7, 0), DomainError);
}

TEST_CASE("quadrature oracle") {
    const BetaGaussian n(2.0);
    auto normal_tail = [](double T) { return std::erfc(T / std::sqrt(2.0)) * (1.0 + T * T + T); };
    const auto r1 = quad_oracle([&](double y) { return n.density(y); }, normal_tail);
    CHECK(r1.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r1.error_estimate <= 1e-12);
    const auto r2 = quad_oracle([&](double y) { return y * y * n.density(y); }, normal_tail);
    CHECK(r2.value == doctest::Approx(1.0).epsilon(1e-10));
    const BetaGaussian d(0.5);
    const auto r3 = quad_oracle([&](double y) { return std::exp(0.5 * std::sqrt(std::abs(y))) * d.density(y); },
                                [&](double T) {
                                    // tail of exp(-sqrt(y)) * c: 2 c * 2 (1 + sqrt T) e^{-sqrt T}, doubled
                                    return 8.0 * d.c_beta() * (1.0 + std::sqrt(T)) * std::exp(-std::sqrt(T));
                                });
    CHECK(r3.value == doctest::Approx(d.exp_moment(0.5, 0.5, 0)).epsilon(1e-11));
    QuadratureSpec bad;
    bad.abs_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = QuadratureSpec{};
    bad.max_subdivisions = 0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gevqmc/errors.hpp"
#include "gevqmc/field.hpp"

using namespace gevqmc;

TEST_CASE("psi") {
    CHECK(psi(1, 2.0, {0.5, 0.5}) == doctest::Approx(0.5));
    CHECK(psi(2, 2.0, {0.25, 0.25}) == doctest::Approx(0.125));
    for (int j = 1; j < 6; ++j) {
        CHECK(std::abs(psi(j, 1.75, {0.0, 0.3})) < 1e-15);
        CHECK(std::abs(psi(j, 1.75, {0.3, 1.0})) < 1e-14);
    }
    CHECK_THROWS_AS(psi(0, 2.0, {0.5, 0.5}), DomainError);
}

TEST_CASE("link and xi") {
    CHECK(link_h(0.0) == 0.0);
    CHECK(link_h(1.0) == 0.5);
    CHECK(link_h(-4.0) == doctest::Approx(-4.0 / 3.0));
    for (double y : {1e-3, 0.3, 2.0, 50.0}) {
        CHECK(std::abs(link_h(y)) <= std::sqrt(y));
        CHECK(std::abs(link_h(y)) <= y);
    }
    CHECK(gevrey_xi(0.0) == 0.0);
    CHECK(gevrey_xi(1e-200) == 0.0);
    CHECK(gevrey_xi(0.5) == doctest::Approx(std::exp(-4.0)));
    CHECK(gevrey_xi(-0.5) == gevrey_xi(0.5));
    CHECK(gevrey_xi(1e6) < 1.0);
}

TEST_CASE("Gevrey coefficient") {
    GevreyField f;
    f.s = 10;
    const std::vector<double> zero(10, 0.0);
    CHECK(f.evaluate({0.3, 0.6}, zero) == 1.0);
    std::vector<double> y(10, 2.0);
    CHECK(f.evaluate({0.0, 0.6}, y) == doctest::Approx(1.0));
    GevreyField one = f;
    one.s = 1;
    const std::vector<double> y1{1.0};
    CHECK(one.evaluate({0.5, 0.5}, y1) == doctest::Approx(std::exp(0.25) * std::exp(std::exp(-4.0))).epsilon(1e-14));
    GevreyField bad;
    bad.vartheta = 1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("truncation consistency and positivity") {
    GevreyField f;
    f.vartheta = 1.75;
    f.s = 128;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::normal_distribution<double> ny(0.0, 2.0);
    std::vector<double> sup(4, 0.0);
    for (int draw = 0; draw < 1000; ++draw) {
        const Eigen::Vector2d x(ux(rng), ux(rng));
        std::vector<double> y(128);
        for (double& v : y) v = ny(rng);
        const double full = f.evaluate(x, y);
        CHECK(full > 0.0);
        int idx = 0;
        for (int s : {8, 16, 32, 64}) {
            const double part = f.evaluate(x, std::span<const double>(y.data(), s));
            sup[idx] = std::max(sup[idx], std::abs(part - full));
            ++idx;
        }
    }
    for (int i = 1; i < 4; ++i) CHECK(sup[i] < sup[i - 1]);
}

TEST_CASE("lognormal coefficient") {
    LognormalField f;
    f.a0 = [](const Eigen::Vector2d& x) { return 1.0 + x[0]; };
    CHECK(f.evaluate({0.5, 0.5}, std::vector<double>{}) == 1.5);
    f.eigenvalues = {1.0};
    f.eigenfunctions = {[](const Eigen::Vector2d&) { return 1.0; }};
    CHECK(f.evaluate({0.0, 0.0}, std::vector<double>{1.0}) == doctest::Approx(std::numbers::e));
    LognormalField g;
    g.a0 = [](const Eigen::Vector2d&) { return 1.0; };
    g.eigenvalues = {0.25, 4.0};
    g.eigenfunctions = {[](const Eigen::Vector2d& x) { return x[0]; }, [](const Eigen::Vector2d& x) { return x[1]; }};
    const Eigen::Vector2d x(0.3, 0.7);
    const std::vector<double> y{0.8, -0.4};
    const double both = g.evaluate(x, y);
    const double first = g.evaluate(x, std::vector<double>{0.8, 0.0});
    const double second = g.evaluate(x, std::vector<double>{0.0, -0.4});
    CHECK(both == doctest::Approx(first * second).epsilon(1e-15));
}

TEST_CASE("coordinate sequences") {
    GevreyField f;
    f.vartheta = 2.0;
    const CoordinateSequences seq = coordinate_sequences(f, 50);
    CHECK(seq.p == doctest::Approx(0.501));
    CHECK(seq.alpha[0] == 0.5);
    CHECK(seq.b[0] == doctest::Approx(std::pow(2.0, 1.5) * 3.0 * 0.5));
    for (std::size_t j = 1; j < seq.b.size(); ++j) {
        CHECK(seq.b[j] <= seq.b[j - 1]);
        CHECK(seq.alpha[j] <= seq.alpha[j - 1]);
    }
    CHECK(coordinate_sequences(f, 5, 0.7).p == 0.7);
}

TEST_CASE("a_min model") {
    const std::vector<double> alpha{0.5, 0.25, 0.125};
    CHECK(a_min_model(0.4, alpha, 1.0, std::vector<double>{0, 0, 0}) == 0.4);
    CHECK(a_min_model(0.4, std::vector<double>{0, 0, 0}, 1.0, std::vector<double>{3, -2, 1}) == 0.4);
    const std::vector<double> ones{1, 1, 1};
    const std::vector<double> alpha2{1.0, 0.5, 0.25};
    const double single = a_min_model(1.0, alpha, 1.0, ones);
    CHECK(a_min_model(1.0, alpha2, 1.0, ones) == doctest::Approx(single * single));
    CHECK_THROWS_AS(a_min_model(0.0, alpha, 1.0, ones), DomainError);

    // c = 1/e, tau = 1 lower-bounds the coefficient
    GevreyField f;
    f.s = 20;
    std::vector<double> a(20);
    for (int j = 1; j <= 20; ++j) a[j - 1] = f.psi_sup_norm(j);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::normal_distribution<double> ny(0.0, 3.0);
    for (int draw = 0; draw < 10000; ++draw) {
        const Eigen::Vector2d x(ux(rng), ux(rng));
        std::vector<double> y(20);
        for (double& v : y) v = ny(rng);
        CHECK(a_min_model(std::exp(-1.0), a, 1.0, y) <= f.evaluate(x, y));
    }
}

TEST_CASE("sampler matches pointwise evaluation") {
    GevreyField f;
    f.s = 12;
    Eigen::Matrix<double, Eigen::Dynamic, 2> pts(5, 2);
    pts << 0.1, 0.2, 0.5, 0.5, 0.9, 0.3, 0.33, 0.77, 0.0, 0.4;
    const FieldSampler sampler(f, pts);
    std::vector<double> y(12);
    for (int j = 0; j < 12; ++j) y[j] = std::sin(1.0 + j) * 2.0;
    Eigen::VectorXd out;
    sampler.evaluate(y, out);
    for (int k = 0; k < 5; ++k) CHECK(out[k] == doctest::Approx(f.evaluate(pts.row(k).transpose(), y)).epsilon(1e-13));
    sampler.evaluate(std::span<const double>(y.data(), 4), out);
    for (int k = 0; k < 5; ++k)
        CHECK(out[k] == doctest::Approx(f.evaluate(pts.row(k).transpose(), std::span<const double>(y.data(), 4))).epsilon(1e-13));
    const FieldSampler logn(f, pts, FieldSampler::Kind::lognormal);
    const LognormalField lf = make_lognormal_field(f);
    logn.evaluate(y, out);
    for (int k = 0; k < 5; ++k) CHECK(out[k] == doctest::Approx(lf.evaluate(pts.row(k).transpose(), y)).epsilon(1e-13));
}

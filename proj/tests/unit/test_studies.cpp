#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gevqmc/errors.hpp"
#include "gevqmc/lattice.hpp"
#include "gevqmc/studies.hpp"

using namespace gevqmc;

namespace {

StudyConfig small() {
    StudyConfig cfg;
    cfg.vartheta = 2.0;
    cfg.s = 8;
    cfg.k = 3;
    cfg.n_list = {17, 31, 67};
    cfg.R = 4;
    cfg.s_list = {1, 2, 4};
    cfg.s_reference = 8;
    cfg.n_trunc = 67;
    cfg.k_list = {1, 2};
    cfg.k_reference = 3;
    cfg.n_fem = 31;
    return cfg;
}

}  // namespace

TEST_CASE("rate fitting") {
    const RateFit a = fit_rate({{1, 1}, {10, 0.1}});
    CHECK(a.slope == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(a.intercept) < 1e-14);
    std::vector<std::pair<double, double>> pts;
    for (double x : {1.0, 2.0, 3.5, 7.0, 11.0}) pts.emplace_back(x, 3 * x * x);
    const RateFit b = fit_rate(pts);
    CHECK(b.slope == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(std::exp(b.intercept) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(b.residual < 1e-12);
    // a reference H1 error series for vartheta = 1.75
    const std::vector<std::pair<double, double>> fig{
        {17, 0.000326005},  {31, 0.000266371},   {67, 0.000161875},   {127, 0.0000664711}, {263, 0.0000346036},
        {503, 0.0000226511}, {1013, 0.0000122649}, {2003, 0.0000107224}, {4003, 4.36918e-6},  {8009, 3.79533e-6},
        {16007, 2.15499e-6}, {32009, 1.37072e-6},  {63997, 1.29591e-6}};
    const RateFit c = fit_rate(fig);
    CHECK(c.slope == doctest::Approx(-0.720539).epsilon(1e-4));
    CHECK(std::exp(c.intercept) == doctest::Approx(0.00240776).epsilon(1e-4));
    CHECK_THROWS_AS(fit_rate({{1, 1}}), DomainError);
    CHECK_THROWS_AS(fit_rate({{1, 1}, {2, 0}}), DomainError);
    CHECK_THROWS_AS(fit_rate({{1, 1}, {-2, 1}}), DomainError);
}

TEST_CASE("csv layout") {
    RateTable t;
    t.study = "x";
    t.rows = {{1, 0.5, 0.25}, {2, 0.25, 0.0625}};
    t.fit();
    t.metadata.emplace_back("seed", "3");
    const std::string csv = t.to_csv();
    CHECK(csv.rfind("abscissa,h1_error,l2_error\n1,0.5,0.25\n2,0.25,0.0625\n# fit_h1_slope=-1\n", 0) == 0);
    CHECK(csv.find("# fit_l2_slope=-2\n") != std::string::npos);
    CHECK(csv.find("# seed=3\n") != std::string::npos);
}

TEST_CASE("deterministic coefficient gives zero QMC error") {
    StudyConfig cfg = small();
    cfg.amplitude = 0.0;
    const RateTable t = qmc_convergence_study(cfg);
    for (const auto& row : t.rows) {
        CHECK(row.h1_error == 0.0);
        CHECK(row.l2_error == 0.0);
    }
}

TEST_CASE("studies are independent of the worker count") {
    const StudyConfig cfg = small();
    CHECK(qmc_convergence_study(cfg, {1, {}}).to_csv() == qmc_convergence_study(cfg, {3, {}}).to_csv());
    CHECK(truncation_study(cfg, {1, {}}).to_csv() == truncation_study(cfg, {2, {}}).to_csv());
    CHECK(fem_study(cfg, {1, {}}).to_csv() == fem_study(cfg, {4, {}}).to_csv());
}

TEST_CASE("reference rows vanish") {
    StudyConfig cfg = small();
    cfg.s_list = {2, 4, 8};
    const RateTable t = truncation_study(cfg);
    CHECK(t.rows.back().h1_error == 0.0);
    CHECK(t.rows[0].h1_error > t.rows[1].h1_error);
    cfg.k_list = {1, 2, 3};
    const RateTable f = fem_study(cfg);
    CHECK(f.rows.front().abscissa == 0.125);
    CHECK(f.rows.front().h1_error == 0.0);
    CHECK(f.rows[1].h1_error < f.rows[2].h1_error);
}

TEST_CASE("standard error scales with the shift count") {
    StudyConfig cfg = small();
    cfg.k = 2;
    cfg.s = 4;
    double ratio = 0.0;
    cfg.R = 16;
    const RateTable few = qmc_convergence_study(cfg);
    cfg.R = 64;
    const RateTable many = qmc_convergence_study(cfg);
    for (std::size_t i = 0; i < few.rows.size(); ++i) ratio += few.rows[i].h1_error / many.rows[i].h1_error;
    ratio /= static_cast<double>(few.rows.size());
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("stored generating vectors reproduce a fused run") {
    StudyConfig cfg = small();
    const auto dir = std::filesystem::temp_directory_path() / "gevqmc_lattice_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const PodWeights w = study_weights(cfg, cfg.s);
    for (std::int64_t n : cfg.n_list) {
        std::ofstream os(dir / ("z_" + std::to_string(n) + ".txt"));
        write_generating_vector(os, cbc_construct(n, cfg.s, w, study_kernel(cfg, n)).vector);
    }
    const std::string fused = qmc_convergence_study(cfg).to_csv();
    cfg.lattice_dir = dir.string();
    CHECK(qmc_convergence_study(cfg).to_csv() == fused);
    std::filesystem::remove_all(dir);
}

TEST_CASE("derived quantities") {
    StudyConfig cfg;
    const DerivedQuantities d = derive(cfg);
    CHECK(d.rate == doctest::Approx(0.69975));
    CHECK(d.lambda == doctest::Approx(1.0 / (2.0 - 0.5005 - 0.1)));
    CHECK(d.K > 0.0);
    StudyConfig bad = small();
    bad.kernel = "/nonexistent/table_%n.txt";
    CHECK_THROWS_AS(study_kernel(bad, 17), ConfigError);
}

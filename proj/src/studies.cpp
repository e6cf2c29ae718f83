#include "gevqmc/studies.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "gevqmc/betagauss.hpp"
#include "gevqmc/errors.hpp"
#include "gevqmc/fem.hpp"
#include "gevqmc/field.hpp"
#include "gevqmc/io.hpp"
#include "gevqmc/parallel.hpp"

namespace gevqmc {

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw DomainError("fit_rate: need at least two points");
    const double m = static_cast<double>(points.size());
    double sx = 0, sy = 0;
    for (const auto& [x, e] : points) {
        if (!(x > 0.0) || !(e > 0.0)) throw DomainError("fit_rate: abscissae and values must be positive");
        sx += std::log(x);
        sy += std::log(e);
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (const auto& [x, e] : points) {
        const double dx = std::log(x) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(e) - my);
    }
    if (!(sxx > 0.0)) throw DomainError("fit_rate: abscissae must not all coincide");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (const auto& [x, e] : points) {
        const double d = std::log(e) - (fit.intercept + fit.slope * std::log(x));
        ss += d * d;
    }
    fit.residual = std::sqrt(ss);
    return fit;
}

void RateTable::fit() {
    std::vector<std::pair<double, double>> h1, l2;
    for (const auto& row : rows) {
        if (row.h1_error > 0.0) h1.emplace_back(row.abscissa, row.h1_error);
        if (row.l2_error > 0.0) l2.emplace_back(row.abscissa, row.l2_error);
    }
    h1_fit = h1.size() >= 2 ? fit_rate(h1) : RateFit{};
    l2_fit = l2.size() >= 2 ? fit_rate(l2) : RateFit{};
}

std::string RateTable::to_csv() const {
    std::string out = "abscissa,h1_error,l2_error\n";
    for (const auto& row : rows)
        out += format_real(row.abscissa) + "," + format_real(row.h1_error) + "," + format_real(row.l2_error) + "\n";
    out += "# fit_h1_slope=" + format_real(h1_fit.slope) + "\n";
    out += "# fit_h1_intercept=" + format_real(h1_fit.intercept) + "\n";
    out += "# fit_h1_residual=" + format_real(h1_fit.residual) + "\n";
    out += "# fit_l2_slope=" + format_real(l2_fit.slope) + "\n";
    out += "# fit_l2_intercept=" + format_real(l2_fit.intercept) + "\n";
    out += "# fit_l2_residual=" + format_real(l2_fit.residual) + "\n";
    out += "# study=" + study + "\n";
    for (const auto& [k, v] : metadata) out += "# " + k + "=" + v + "\n";
    return out;
}

DerivedQuantities derive(const StudyConfig& cfg) {
    DerivedQuantities d;
    const SpaceParams sp = cfg.space();
    d.p = cfg.summability_p();
    d.lambda = select_lambda(d.p, cfg.sigma, sp);
    d.K = kernel_constant_K(sp);
    d.rate = theoretical_rate(d.p, sp);
    return d;
}

PodWeights study_weights(const StudyConfig& cfg, int s_max) {
    const DerivedQuantities d = derive(cfg);
    const CoordinateSequences seq = coordinate_sequences(cfg.gevrey_field(s_max), s_max, cfg.p);
    return build_pod_weights(s_max, cfg.sigma, d.lambda, cfg.C, seq.b, seq.alpha, cfg.space(), d.K);
}

KernelTable study_kernel(const StudyConfig& cfg, std::int64_t n) {
    if (cfg.kernel == "surrogate") return KernelTable::surrogate(n);
    std::string path = cfg.kernel;
    if (path.rfind("table:", 0) == 0) path.erase(0, 6);
    if (const auto pos = path.find("%n"); pos != std::string::npos) path.replace(pos, 2, std::to_string(n));
    std::ifstream is(path);
    if (!is) throw ConfigError("kernel table '" + path + "' not found");
    KernelTable table = read_kernel_table(is, path);
    if (static_cast<std::int64_t>(table.values.size()) != n)
        throw ConfigError("kernel table '" + path + "' must hold " + std::to_string(n) + " values");
    return table;
}

GeneratingVector study_vector(const StudyConfig& cfg, std::int64_t n, int s_max) {
    if (!cfg.lattice_dir.empty()) {
        const auto path = std::filesystem::path(cfg.lattice_dir) / ("z_" + std::to_string(n) + ".txt");
        if (std::filesystem::exists(path)) {
            std::ifstream is(path);
            GeneratingVector g = read_generating_vector(is);
            if (g.n != n) throw ConfigError(path.string() + ": header n does not match");
            if (g.s() < s_max) throw ConfigError(path.string() + ": holds fewer than " + std::to_string(s_max) + " components");
            g.z.resize(s_max);
            return g;
        }
    }
    return cbc_construct(n, s_max, study_weights(cfg, s_max), study_kernel(cfg, n)).vector;
}

namespace {

/// Per-level sampling state: coefficient at the rule points for any y, the
/// load vector, and one solver per worker.
class LevelSolver {
public:
    LevelSolver(const StudyConfig& cfg, int level, int s_max, int threads)
        : space_(std::make_shared<const FemSpace>(level)),
          rule_(cfg.quadrature == "edge_midpoint" ? CoefficientRule::edge_midpoint : CoefficientRule::centroid),
          sampler_(cfg.gevrey_field(s_max), coefficient_points(space_->mesh(), rule_),
                   cfg.field == "lognormal" ? FieldSampler::Kind::lognormal : FieldSampler::Kind::gevrey),
          rhs_(space_->load([](const Eigen::Vector2d& x) { return x[1]; })) {
        for (int w = 0; w < threads; ++w) solvers_.push_back(std::make_unique<PoissonSolver>(space_));
        buffers_.resize(threads);
    }

    const FemSpace& space() const { return *space_; }
    std::shared_ptr<const FemSpace> space_ptr() const { return space_; }
    Eigen::Index dofs() const { return rhs_.size(); }

    Eigen::VectorXd solve(std::span<const double> y, int worker) {
        Eigen::VectorXd& coeff = buffers_[worker];
        sampler_.evaluate(y, coeff);
        if (rule_ == CoefficientRule::centroid) return solvers_[worker]->solve(coeff, rhs_).values;
        return solvers_[worker]->solve(triangle_coefficients(coeff, rule_), rhs_).values;
    }

private:
    std::shared_ptr<const FemSpace> space_;
    CoefficientRule rule_;
    FieldSampler sampler_;
    Eigen::VectorXd rhs_;
    std::vector<std::unique_ptr<PoissonSolver>> solvers_;
    std::vector<Eigen::VectorXd> buffers_;
};

/// A fixed list of vectors that sums componentwise.
struct Bundle {
    std::vector<Eigen::VectorXd> parts;
    Bundle& operator+=(const Bundle& o) {
        for (std::size_t i = 0; i < parts.size(); ++i) parts[i] += o.parts[i];
        return *this;
    }
};

Bundle zero_bundle(const std::vector<Eigen::Index>& sizes) {
    Bundle b;
    for (auto n : sizes) b.parts.push_back(Eigen::VectorXd::Zero(n));
    return b;
}

/// Maps lattice point i (0-based) with a shift to y in R^s by the inverse
/// beta-Gaussian CDF.
struct PointMap {
    const GeneratingVector& g;
    Eigen::VectorXd shift;
    BetaGaussian dist;

    void operator()(std::size_t i, std::vector<double>& y) const {
        y.resize(g.s());
        lattice_point(g, static_cast<std::int64_t>(i) + 1, std::span<const double>(shift.data(), shift.size()), y);
        for (double& t : y) t = dist.inv_cdf(t);
    }
};

void common_metadata(RateTable& table, const StudyConfig& cfg, const std::string& kernel) {
    const DerivedQuantities d = derive(cfg);
    table.metadata.emplace_back("lambda", format_real(d.lambda));
    table.metadata.emplace_back("K", format_real(d.K));
    table.metadata.emplace_back("theoretical_rate", format_real(d.rate));
    table.metadata.emplace_back("p", format_real(d.p));
    table.metadata.emplace_back("kernel", kernel);
    table.metadata.emplace_back("seed", std::to_string(cfg.seed));
    table.metadata.emplace_back("config_hash", cfg.hash());
    std::istringstream lines(cfg.canonical());
    std::string line;
    while (std::getline(lines, line)) {
        const auto eq = line.find('=');
        table.metadata.emplace_back("config." + line.substr(0, eq), line.substr(eq + 1));
    }
}

void report(const StudyOptions& opt, const std::string& msg) {
    if (opt.progress) opt.progress(msg);
}

std::string kernel_label(const StudyConfig& cfg) {
    return cfg.kernel == "surrogate" ? std::string("surrogate") : "table:" + cfg.kernel;
}

}  // namespace

RateTable qmc_convergence_study(const StudyConfig& cfg, const StudyOptions& opt) {
    cfg.validate();
    if (cfg.R < 2) throw ConfigError("qmc-study: R must be >= 2");
    const int threads = std::max(1, opt.threads);
    LevelSolver level(cfg, cfg.k, cfg.s, threads);
    const ShiftSet shifts = ShiftSet::generate(cfg.R, cfg.s, cfg.seed);

    RateTable table;
    table.study = "qmc";
    for (std::int64_t n : cfg.n_list) {
        const GeneratingVector g = study_vector(cfg, n, cfg.s);
        std::vector<Eigen::VectorXd> Q(cfg.R);
        for (int r = 0; r < cfg.R; ++r) {
            const PointMap map{g, shifts.shifts.row(r).transpose(), BetaGaussian(cfg.beta)};
            const Bundle sum = ordered_sum(static_cast<std::size_t>(n), threads, zero_bundle({level.dofs()}),
                                           [&](std::size_t i, int worker) {
                                               std::vector<double> y;
                                               map(i, y);
                                               return Bundle{{level.solve(y, worker)}};
                                           });
            Q[r] = sum.parts[0] / static_cast<double>(n);
        }
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(level.dofs());
        for (const auto& q : Q) mean += q;
        mean /= cfg.R;
        double h1 = 0.0, l2 = 0.0;
        for (const auto& q : Q) {
            const Eigen::VectorXd d = mean - q;
            h1 += std::pow(h1_seminorm(level.space(), d), 2);
            l2 += std::pow(l2_norm(level.space(), d), 2);
        }
        const double scale = 1.0 / (static_cast<double>(cfg.R) * (cfg.R - 1));
        table.rows.push_back({static_cast<double>(n), std::sqrt(h1 * scale), std::sqrt(l2 * scale)});
        report(opt, "n=" + std::to_string(n) + " h1=" + format_real(table.rows.back().h1_error));
    }
    table.fit();
    table.metadata.emplace_back("mesh_level", std::to_string(cfg.k));
    common_metadata(table, cfg, kernel_label(cfg));
    return table;
}

RateTable truncation_study(const StudyConfig& cfg, const StudyOptions& opt) {
    cfg.validate();
    const int threads = std::max(1, opt.threads);
    const int s_ref = cfg.s_reference;
    LevelSolver level(cfg, cfg.k, s_ref, threads);
    const GeneratingVector g = study_vector(cfg, cfg.n_trunc, s_ref);
    const ShiftSet shift = ShiftSet::generate(1, s_ref, cfg.seed);
    const PointMap map{g, shift.shifts.row(0).transpose(), BetaGaussian(cfg.beta)};

    // parts[0] is the reference, parts[1 + i] truncates after s_list[i] terms
    const std::size_t m = cfg.s_list.size();
    const Bundle sum = ordered_sum(
        static_cast<std::size_t>(cfg.n_trunc), threads, zero_bundle(std::vector<Eigen::Index>(m + 1, level.dofs())),
        [&](std::size_t i, int worker) {
            std::vector<double> y;
            map(i, y);
            Bundle b;
            b.parts.push_back(level.solve(y, worker));
            for (int s : cfg.s_list) {
                if (s >= s_ref) {
                    b.parts.push_back(b.parts[0]);
                    continue;
                }
                b.parts.push_back(level.solve(std::span<const double>(y.data(), s), worker));
            }
            return b;
        });
    const double inv_n = 1.0 / static_cast<double>(cfg.n_trunc);
    RateTable table;
    table.study = "truncation";
    for (std::size_t i = 0; i < m; ++i) {
        const Eigen::VectorXd d = (sum.parts[0] - sum.parts[1 + i]) * inv_n;
        table.rows.push_back({static_cast<double>(cfg.s_list[i]), h1_seminorm(level.space(), d), l2_norm(level.space(), d)});
        report(opt, "s=" + std::to_string(cfg.s_list[i]) + " h1=" + format_real(table.rows.back().h1_error));
    }
    table.fit();
    table.metadata.emplace_back("mesh_level", std::to_string(cfg.k));
    table.metadata.emplace_back("n", std::to_string(cfg.n_trunc));
    common_metadata(table, cfg, kernel_label(cfg));
    return table;
}

RateTable fem_study(const StudyConfig& cfg, const StudyOptions& opt) {
    cfg.validate();
    const int threads = std::max(1, opt.threads);
    std::vector<std::unique_ptr<LevelSolver>> levels;
    levels.push_back(std::make_unique<LevelSolver>(cfg, cfg.k_reference, cfg.s, threads));
    for (int k : cfg.k_list) levels.push_back(std::make_unique<LevelSolver>(cfg, k, cfg.s, threads));
    std::vector<Eigen::Index> sizes;
    for (const auto& l : levels) sizes.push_back(l->dofs());

    const GeneratingVector g = study_vector(cfg, cfg.n_fem, cfg.s);
    const ShiftSet shift = ShiftSet::generate(1, cfg.s, cfg.seed);
    const PointMap map{g, shift.shifts.row(0).transpose(), BetaGaussian(cfg.beta)};
    const Bundle sum = ordered_sum(static_cast<std::size_t>(cfg.n_fem), threads, zero_bundle(sizes),
                                   [&](std::size_t i, int worker) {
                                       std::vector<double> y;
                                       map(i, y);
                                       Bundle b;
                                       for (auto& l : levels) b.parts.push_back(l->solve(y, worker));
                                       return b;
                                   });
    const double inv_n = 1.0 / static_cast<double>(cfg.n_fem);
    const FemSpace& ref = levels[0]->space();
    const Eigen::VectorXd ref_mean = sum.parts[0] * inv_n;
    RateTable table;
    table.study = "fem";
    // abscissa h = 2^-k increases as k decreases
    for (std::size_t i = cfg.k_list.size(); i-- > 0;) {
        const int k = cfg.k_list[i];
        const Eigen::VectorXd fine = prolong_values(sum.parts[1 + i] * inv_n, k, cfg.k_reference);
        const Eigen::VectorXd d = ref_mean - fine;
        table.rows.push_back({std::ldexp(1.0, -k), h1_seminorm(ref, d), l2_norm(ref, d)});
        report(opt, "k=" + std::to_string(k) + " h1=" + format_real(table.rows.back().h1_error));
    }
    table.fit();
    table.metadata.emplace_back("s", std::to_string(cfg.s));
    table.metadata.emplace_back("n", std::to_string(cfg.n_fem));
    common_metadata(table, cfg, kernel_label(cfg));
    return table;
}

}  // namespace gevqmc

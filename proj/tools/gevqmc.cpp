// gevqmc: lattice construction and convergence studies for a diffusion
// problem with a Gevrey-regular random coefficient.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "gevqmc/config.hpp"
#include "gevqmc/errors.hpp"
#include "gevqmc/io.hpp"
#include "gevqmc/lattice.hpp"
#include "gevqmc/parallel.hpp"
#include "gevqmc/studies.hpp"
#include "gevqmc/weights.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

using namespace gevqmc;

StudyConfig resolve(const std::string& config_path, bool full, const std::map<std::string, std::string>& overrides) {
    StudyConfig cfg;
    if (full) apply_full_scale(cfg);
    if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is) throw ConfigError("config file '" + config_path + "' not found");
        read_config(is, cfg);
    }
    for (const auto& [key, value] : overrides) cfg.set(key, value);
    cfg.validate();
    return cfg;
}

std::string header_lines(const StudyConfig& cfg) {
    const DerivedQuantities d = derive(cfg);
    std::string out;
    out += "# lambda=" + format_real(d.lambda) + "\n";
    out += "# K=" + format_real(d.K) + "\n";
    out += "# theoretical_rate=" + format_real(d.rate) + "\n";
    out += "# config_hash=" + cfg.hash() + "\n";
    return out;
}

int run_validate(const StudyConfig& cfg, const std::string& weights_out) {
    const DerivedQuantities d = derive(cfg);
    std::cout << "config ok\n"
              << "p=" << format_real(d.p) << "\n"
              << "lambda=" << format_real(d.lambda) << "\n"
              << "K=" << format_real(d.K) << "\n"
              << "theoretical_rate=" << format_real(d.rate) << "\n"
              << "config_hash=" << cfg.hash() << "\n";
    if (!weights_out.empty()) {
        std::ostringstream os;
        os << header_lines(cfg);
        write_weights(os, study_weights(cfg, cfg.s));
        atomic_write(weights_out, os.str());
    }
    return 0;
}

struct CbcOptions {
    std::int64_t n = 0;        // 0: every n in n_list
    std::string weights;       // empty: weights from the config
    std::string out;           // single-vector output file, needs n
};

std::string kernel_label(const StudyConfig& cfg) {
    if (cfg.kernel == "surrogate" || cfg.kernel.rfind("table:", 0) == 0) return cfg.kernel;
    return "table:" + cfg.kernel;
}

std::string vector_file(const StudyConfig& cfg, const PodWeights& w, std::int64_t n) {
    const CbcResult res = cbc_construct(n, cfg.s, w, study_kernel(cfg, n));
    std::ostringstream os;
    os << header_lines(cfg);
    os << "# kernel=" << kernel_label(cfg) << "\n";
    os << "# criterion=" << format_real(res.criterion.back()) << "\n";
    write_generating_vector(os, res.vector);
    std::cout << "n=" << n << " criterion=" << format_real(res.criterion.back()) << "\n";
    return os.str();
}

int run_cbc(const StudyConfig& cfg, const CbcOptions& opt) {
    PodWeights w = study_weights(cfg, cfg.s);
    if (!opt.weights.empty()) {
        std::istringstream is(read_file(opt.weights));
        w = read_weights(is);
        if (w.max_dimension() < cfg.s)
            throw ConfigError("weights file '" + opt.weights + "' holds fewer than s factors");
    }
    if (!opt.out.empty()) {
        if (opt.n == 0) throw ConfigError("cbc --out needs --n");
        atomic_write(opt.out, vector_file(cfg, w, opt.n));
        return 0;
    }
    const std::filesystem::path dir = cfg.output.empty() ? "lattice" : cfg.output;
    const std::vector<std::int64_t> ns = opt.n == 0 ? cfg.n_list : std::vector<std::int64_t>{opt.n};
    for (std::int64_t n : ns) atomic_write(dir / ("z_" + std::to_string(n) + ".txt"), vector_file(cfg, w, n));
    std::ostringstream os;
    os << header_lines(cfg);
    write_weights(os, w);
    atomic_write(dir / "weights.txt", os.str());
    std::ostringstream shifts;
    shifts << "# seed=" << cfg.seed << "\n";
    write_shifts(shifts, ShiftSet::generate(cfg.R, cfg.s, cfg.seed));
    atomic_write(dir / "shifts.txt", shifts.str());
    return 0;
}

int run_study(const std::string& name, const StudyConfig& cfg, int threads, bool quiet) {
    StudyOptions opt;
    opt.threads = threads;
    if (!quiet) opt.progress = [&](const std::string& msg) { std::cerr << name << ": " << msg << std::endl; };
    RateTable table = name == "qmc-study"     ? qmc_convergence_study(cfg, opt)
                      : name == "trunc-study" ? truncation_study(cfg, opt)
                                              : fem_study(cfg, opt);
    const std::string path = cfg.output.empty() ? name + ".csv" : cfg.output;
    atomic_write(path, table.to_csv());
    std::cout << name << ": fit_h1_slope=" << format_real(table.h1_fit.slope)
              << " fit_l2_slope=" << format_real(table.l2_fit.slope) << " -> " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lattice rules and convergence studies for Gevrey-regular random diffusion"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    bool full = false;
    bool quiet = false;
    int threads = gevqmc::default_threads();
    std::string weights_out;
    app.add_option("-c,--config", config_path, "key=value config file");
    app.add_flag("--full", full, "full-scale sizes (multi-hour)");
    app.add_flag("-q,--quiet", quiet, "no progress output");
    app.add_option("--threads", threads, "worker count")->check(CLI::PositiveNumber);

    std::map<std::string, std::string> overrides;
    std::map<std::string, std::string> raw;
    for (const auto& key : gevqmc::StudyConfig::keys())
        app.add_option("--" + key, raw[key], "override config key '" + key + "'");

    auto* validate = app.add_subcommand("validate", "check a config and print derived quantities");
    validate->add_option("--weights-out", weights_out, "write the POD weights to this file");
    CbcOptions cbc_opt;
    auto* cbc = app.add_subcommand("cbc", "construct generating vectors for every n in n_list");
    cbc->add_option("--n", cbc_opt.n, "a single prime n instead of n_list");
    cbc->add_option("--weights", cbc_opt.weights, "weights file as written by validate --weights-out");
    cbc->add_option("--out", cbc_opt.out, "write the one vector for --n to this file");
    app.add_subcommand("qmc-study", "RMS error of the randomly shifted lattice rule against n");
    app.add_subcommand("trunc-study", "dimension truncation error against s");
    app.add_subcommand("fem-study", "finite element error against h");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    for (const auto& key : gevqmc::StudyConfig::keys())
        if (app.count("--" + key) > 0) overrides[key] = raw[key];

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        const gevqmc::StudyConfig cfg = resolve(config_path, full, overrides);
        if (cmd == "validate") return run_validate(cfg, weights_out);
        if (cmd == "cbc") return run_cbc(cfg, cbc_opt);
        return run_study(cmd, cfg, threads, quiet);
    } catch (const gevqmc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const gevqmc::DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const gevqmc::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gevqmc/field.hpp"
#include "gevqmc/weights.hpp"

namespace gevqmc {

/// Parameters shared by the three studies and the cbc/validate commands.
/// Desk-scale defaults; `full_scale` switches to the full-scale sizes.
struct StudyConfig {
    std::string field = "gevrey";  // gevrey | lognormal
    double vartheta = 1.75;
    double amplitude = 0.5;
    double sigma = 1.5;
    double C_xi = 3.0;
    double beta = 0.5;
    double tau = 0.5;
    double theta = 1.001;
    double r = 0.70;
    double delta = 0.05;
    double C = 1.0;
    double p = 0.0;  // <= 0: 1/vartheta + 1e-3
    int s = 50;
    int s_reference = 64;
    std::vector<int> s_list{2, 4, 8, 16, 32};
    int k = 5;
    int k_reference = 6;
    std::vector<int> k_list{1, 2, 3, 4, 5};
    std::vector<std::int64_t> n_list{17, 31, 67, 127, 263, 503, 1013, 2003};
    int R = 8;
    std::int64_t n_trunc = 4003;
    std::int64_t n_fem = 2003;
    std::uint64_t seed = 2024;
    std::string kernel = "surrogate";  // surrogate | path to a table of n values
    std::string quadrature = "centroid";  // centroid | edge_midpoint
    std::string lattice_dir;              // reuse "<dir>/z_<n>.txt" when present
    std::string output;

    /// Every key accepted in a config file and as a --key flag.
    static const std::vector<std::string>& keys();
    /// Throws ConfigError on unknown keys or malformed values.
    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;

    SpaceParams space() const;
    GevreyField gevrey_field(int terms) const;
    double summability_p() const;

    /// Throws ConfigError on any constraint violation.
    void validate() const;
    /// "key=value" lines in key order, excluding output and lattice_dir
    /// (neither changes a result).
    std::string canonical() const;
    std::string hash() const;
};

/// key=value lines; '#' starts a comment; blank lines ignored.
void read_config(std::istream& is, StudyConfig& cfg);

/// Sizes of the full experiments: s = 100, h = 2^-7, n up to 63997, R = 16,
/// s' = 256.
void apply_full_scale(StudyConfig& cfg);

}  // namespace gevqmc

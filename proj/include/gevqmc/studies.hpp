#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gevqmc/config.hpp"
#include "gevqmc/lattice.hpp"
#include "gevqmc/weights.hpp"

namespace gevqmc {

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;  // natural log of the prefactor
    double residual = 0.0;   // 2-norm of the log-space residuals
};

/// Least squares on (log x, log e). Needs >= 2 points with x, e > 0.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

struct RateRow {
    double abscissa;
    double h1_error;
    double l2_error;
};

struct RateTable {
    std::string study;
    std::vector<RateRow> rows;
    RateFit h1_fit;
    RateFit l2_fit;
    /// Echoed as "# key=value" after the fits.
    std::vector<std::pair<std::string, std::string>> metadata;

    /// Fits both columns over the rows with positive errors.
    void fit();
    std::string to_csv() const;
};

/// Quantities derived from a config: lambda, K and the predicted QMC rate.
struct DerivedQuantities {
    double p;
    double lambda;
    double K;
    double rate;
};
DerivedQuantities derive(const StudyConfig& cfg);

/// POD weights for the first s_max coordinates of the configured field.
PodWeights study_weights(const StudyConfig& cfg, int s_max);

/// Kernel for n points: the surrogate, or a table file whose path may contain
/// "%n" as a placeholder for n.
KernelTable study_kernel(const StudyConfig& cfg, std::int64_t n);

/// CBC vector for n points and s_max coordinates, read from
/// "<lattice_dir>/z_<n>.txt" when that file exists and is long enough.
GeneratingVector study_vector(const StudyConfig& cfg, std::int64_t n, int s_max);

struct StudyOptions {
    int threads = 1;
    std::function<void(const std::string&)> progress;
};

RateTable qmc_convergence_study(const StudyConfig& cfg, const StudyOptions& opt = {});
RateTable truncation_study(const StudyConfig& cfg, const StudyOptions& opt = {});
RateTable fem_study(const StudyConfig& cfg, const StudyOptions& opt = {});

}  // namespace gevqmc

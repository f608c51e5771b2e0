#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "latspec/estimators.hpp"
#include "latspec/fields.hpp"
#include "latspec/kernels.hpp"
#include "latspec/lattice.hpp"
#include "latspec/spectra.hpp"

#include <json.hpp>

namespace latspec {

/// Standard normal CDF; |error| < 1e-7 uniformly, monotone.
double normal_cdf(double z);

// ---- theorem statistics -------------------------------------------------

/// (1/2|N|) sum_{j in N} (x(j)+y(j)) / sqrt(f(lambda_j));  -> 0.
double stat_thm2a(const FourierTable& table, const SpectrumFn& f);

/// (1/(4 pi^2 |N|)) sum_{j in N} I(j)/f(lambda_j);  -> 1.
double stat_thm2c(const PeriodogramGrid& pg, const SpectrumFn& f);

/// (1/|N|) sum I^2/f^2;  -> 2 (4 pi^2)^2. Returned raw (unnormalized).
double stat_thm2d(const PeriodogramGrid& pg, const SpectrumFn& f);

/// (1/|N|) sum I^q/f^q, raw.
double stat_thm2e(const PeriodogramGrid& pg, const SpectrumFn& f, double q);

/// Exact sup over z of the weighted empirical-CDF-vs-Phi distance built from
/// the normalized coefficients x(j), y(j), j in N. Empty weights mean equal.
double stat_coro1_ks(const FourierTable& table, const SpectrumFn& f,
                     const std::vector<double>& weights);

enum class Thm3Which { A, B, C, D };

/// Weighted-local-mean statistics with weights p_{s,T} and periodic lookups.
double stat_thm3(const FourierTable& table, const PeriodogramGrid& pg, const WeightTable& weights,
                 Thm3Which which, const SpectrumFn& f, double q);

/// Sup over the estimate's grid of |f_hat - f|.
double stat_thm4_sup(const SpectralEstimate& estimate, const SpectrumFn& f_true);

// ---- experiment engine --------------------------------------------------

extern const std::vector<std::string> kStatisticNames;

struct ExperimentConfig {
    FieldModel model;
    std::vector<LatticeSpec> lattices;
    KernelFamily kernel_family = KernelFamily::EpanechnikovProduct;
    std::optional<std::pair<double, double>> bandwidth;  // explicit pair
    std::optional<double> bandwidth_pow;                 // rule h_k = d_k^{-beta}
    int replications = 1;
    uint64_t seed = 1;
    std::vector<std::string> statistics;
    std::vector<double> weights_coro1;  // empty = equal weights
    double q = 4.5;
    std::vector<double> trend_coefficients;  // thm5_suite: trend polynomial
    int detrend_degree = 2;
    std::vector<int> gmc_radii{1, 2, 3, 4};
    double gmc_alpha = 2.0;
    int threads = 0;        // 0 = LATTICESPEC_THREADS env or hardware default
    bool emit_values = false;

    KernelSpec kernel_for(const LatticeSpec& spec) const;
    void validate() const;
};

struct StatRow {
    LatticeSpec lattice;
    std::string statistic;
    double estimate = 0.0;
    std::optional<double> se;
    double median = 0.0;
    int reps = 0;
    bool low_n = false;
    std::vector<double> values;  // per-replication values when emitted

    StatRow(const LatticeSpec& l, std::string name) : lattice(l), statistic(std::move(name)) {}
};

struct ExperimentReport {
    nlohmann::json config_echo;
    std::vector<StatRow> rows;
    double wall_clock_seconds = 0.0;

    const StatRow* find(const std::string& statistic, const LatticeSpec& lattice) const;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = "");
nlohmann::json config_to_json(const ExperimentConfig& config);

/// JSON document: config echo + one entry per (lattice, statistic), plus wall
/// clock. Deterministic except for the wall-clock field.
nlohmann::json report_to_json(const ExperimentReport& report);
void write_report_csv(const ExperimentReport& report, std::ostream& os);

}  // namespace latspec

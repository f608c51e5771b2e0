#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latspec/lattice.hpp"

#include <json.hpp>

namespace latspec {

/// Zero-mean innovation distribution with closed-form variance.
struct InnovationSpec {
    enum class Dist { Gaussian, Uniform, StudentT };
    Dist dist = Dist::Gaussian;
    double sigma = 1.0;      // Gaussian standard deviation
    double halfwidth = 1.0;  // Uniform on [-b, b]
    double nu = 9.0;         // Student-t degrees of freedom
    double scale = 1.0;      // Student-t scale
    bool allow_low_nu = false;
    uint64_t seed = 0;       // default seed; the simulate() argument wins

    double variance() const;
    /// Draw the innovation at integer site (i1, i2) from the keyed stream.
    double sample(uint64_t seed, uint64_t stream, int64_t i1, int64_t i2) const;
    void validate() const;
};

/// One realization of {V(t): t in T}, row-major with t1 fastest.
struct FieldGrid {
    LatticeSpec spec;
    std::vector<double> values;

    explicit FieldGrid(const LatticeSpec& s) : spec(s), values(static_cast<std::size_t>(s.size()), 0.0) {}

    double at(int t1, int t2) const { return values[grid_offset(spec, t1, t2)]; }
    double& at(int t1, int t2) { return values[grid_offset(spec, t1, t2)]; }
};

struct Coeff2 {
    std::array<int, 2> s{};
    double a = 0.0;
};

struct VolterraCoeff {
    std::array<int, 2> s1{};
    std::array<int, 2> s2{};
    double a = 0.0;
};

/// Generative field description. Linear/Volterra supports are finite windows;
/// the nonlinear AR update comes from a fixed catalog (affine or tanh) so that
/// simulation stays deterministic.
struct FieldModel {
    enum class Kind { WhiteNoise, LinearMA, Volterra2, NonlinearAR };
    enum class ArUpdate { Affine, Tanh };

    Kind kind = Kind::WhiteNoise;
    double mean = 0.0;
    InnovationSpec innovation;

    std::vector<Coeff2> ma_coeffs;            // LinearMA: s -> a_s
    std::vector<VolterraCoeff> volterra_coeffs;
    ArUpdate ar_update = ArUpdate::Affine;
    std::vector<Coeff2> ar_weights;           // NonlinearAR: s in neighborhood -> u_s >= 0

    void validate() const;  // throws std::invalid_argument on contract violations
};

enum class CouplingMode { ReplaceOrigin, ReplaceFar };

FieldGrid simulate(const FieldModel& model, const LatticeSpec& spec, uint64_t seed);

/// Pair (V, V~) sharing innovations except at the replaced positions:
/// ReplaceOrigin swaps eps_0 only; ReplaceFar swaps, for each target site j,
/// every eps_{j-s} with ||s|| >= ||j|| (max norm).
std::pair<FieldGrid, FieldGrid> coupled_simulate(const FieldModel& model, const LatticeSpec& spec,
                                                 uint64_t seed, CouplingMode mode);

/// Monte Carlo estimates of E|V(j) - V^dag(j)|^alpha at j = (radius, 0),
/// one value per requested radius.
std::vector<double> gmc_decay_estimate(const FieldModel& model, const LatticeSpec& spec,
                                       const std::vector<int>& radii, int reps, double alpha,
                                       uint64_t seed);

/// Closed-form spectral density; defined for WhiteNoise and LinearMA only.
double theoretical_spectrum(const FieldModel& model, double l1, double l2);

/// Closed-form autocovariance gamma(h); WhiteNoise and LinearMA only.
double theoretical_autocovariance(const FieldModel& model, int h1, int h2);

FieldModel model_from_json(const nlohmann::json& j);
FieldModel load_model_file(const std::string& path);

void write_field_csv(const FieldGrid& field, std::ostream& os);
FieldGrid read_field_csv(std::istream& is, std::optional<LatticeSpec> declared = std::nullopt);

}  // namespace latspec

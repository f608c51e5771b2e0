#include "latspec/fields.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "latspec/errors.hpp"
#include "latspec/rng.hpp"

namespace latspec {

namespace {

double sample_normal(SiteStream& st) {
    double u1 = st.next_u01();
    double u2 = st.next_u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Marsaglia-Tsang gamma(a, 1) on the site's counter stream.
double sample_gamma(SiteStream& st, double a) {
    double boost = 1.0;
    if (a < 1.0) {
        boost = std::pow(st.next_u01(), 1.0 / a);
        a += 1.0;
    }
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = sample_normal(st);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double u = st.next_u01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return boost * d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return boost * d * v;
    }
}

int max_norm(int a, int b) { return std::max(std::abs(a), std::abs(b)); }

}  // namespace

double InnovationSpec::variance() const {
    switch (dist) {
        case Dist::Gaussian: return sigma * sigma;
        case Dist::Uniform: return halfwidth * halfwidth / 3.0;
        case Dist::StudentT: return scale * scale * nu / (nu - 2.0);
    }
    return 0.0;
}

void InnovationSpec::validate() const {
    switch (dist) {
        case Dist::Gaussian:
            if (!(sigma > 0.0)) throw std::invalid_argument("innovation: sigma must be > 0");
            break;
        case Dist::Uniform:
            if (!(halfwidth > 0.0)) throw std::invalid_argument("innovation: halfwidth must be > 0");
            break;
        case Dist::StudentT:
            if (!(scale > 0.0)) throw std::invalid_argument("innovation: scale must be > 0");
            if (!(nu > 2.0)) throw std::invalid_argument("innovation: nu must be > 2 (finite variance)");
            if (nu <= 8.0 && !allow_low_nu)
                throw std::invalid_argument(
                    "innovation: nu must be > 8 (set allow_low_nu to relax for negative testing)");
            break;
    }
}

double InnovationSpec::sample(uint64_t seed_, uint64_t stream, int64_t i1, int64_t i2) const {
    SiteStream st{seed_, stream, i1, i2};
    switch (dist) {
        case Dist::Gaussian:
            return sigma * sample_normal(st);
        case Dist::Uniform:
            return halfwidth * (2.0 * st.next_u01() - 1.0);
        case Dist::StudentT: {
            double z = sample_normal(st);
            double chi2 = 2.0 * sample_gamma(st, nu / 2.0);
            return scale * z / std::sqrt(chi2 / nu);
        }
    }
    return 0.0;
}

void FieldModel::validate() const {
    innovation.validate();
    switch (kind) {
        case Kind::WhiteNoise:
            break;
        case Kind::LinearMA: {
            if (ma_coeffs.empty()) throw std::invalid_argument("LinearMA: empty coefficient support");
            std::set<std::array<int, 2>> seen;
            for (const auto& c : ma_coeffs)
                if (!seen.insert(c.s).second)
                    throw std::invalid_argument("LinearMA: duplicate support point");
            break;
        }
        case Kind::Volterra2: {
            if (volterra_coeffs.empty())
                throw std::invalid_argument("Volterra2: empty coefficient support");
            std::set<std::array<std::array<int, 2>, 2>> seen;
            for (const auto& c : volterra_coeffs) {
                if (c.s1 == c.s2)
                    throw std::invalid_argument("Volterra2: diagonal coefficients a_{s,s} must be zero");
                if (!seen.insert({c.s1, c.s2}).second)
                    throw std::invalid_argument("Volterra2: duplicate support point");
            }
            break;
        }
        case Kind::NonlinearAR: {
            if (ar_weights.empty()) throw std::invalid_argument("NonlinearAR: empty neighborhood");
            double total = 0.0;
            for (const auto& w : ar_weights) {
                if (w.s == std::array<int, 2>{0, 0})
                    throw std::invalid_argument("NonlinearAR: neighborhood must not contain 0");
                if (w.a < 0.0) throw std::invalid_argument("NonlinearAR: weights must be >= 0");
                total += w.a;
            }
            if (!(total < 1.0))
                throw std::invalid_argument("NonlinearAR: contraction requires sum of weights < 1");
            break;
        }
    }
}

namespace {

using EpsFn = std::function<double(int64_t, int64_t)>;

// Margin (in sites) after which the AR contraction influence is below 1e-10.
int ar_margin(const FieldModel& m) {
    double total = 0.0;
    int reach = 1;
    for (const auto& w : m.ar_weights) {
        total += w.a;
        reach = std::max(reach, max_norm(w.s[0], w.s[1]));
    }
    int sweeps = static_cast<int>(std::ceil(std::log(1e-10) / std::log(total)));
    return sweeps * reach;
}

// Fixed point of the AR update on the box [lo1,hi1]x[lo2,hi2], zero outside.
// Jacobi sweeps until successive iterates differ by < 1e-10 in sup norm.
std::vector<double> ar_fixed_point(const FieldModel& m, const EpsFn& eps, int64_t lo1, int64_t hi1,
                                   int64_t lo2, int64_t hi2) {
    const int n1 = static_cast<int>(hi1 - lo1 + 1);
    const int n2 = static_cast<int>(hi2 - lo2 + 1);
    std::vector<double> cur(static_cast<std::size_t>(n1) * n2, 0.0);
    std::vector<double> nxt(cur.size());
    std::vector<double> eps_cache(cur.size());
    for (int b = 0; b < n2; ++b)
        for (int a = 0; a < n1; ++a)
            eps_cache[static_cast<std::size_t>(b) * n1 + a] = eps(lo1 + a, lo2 + b);

    auto value = [&](const std::vector<double>& g, int a, int b) -> double {
        if (a < 0 || a >= n1 || b < 0 || b >= n2) return 0.0;
        return g[static_cast<std::size_t>(b) * n1 + a];
    };
    const bool tanh_update = m.ar_update == FieldModel::ArUpdate::Tanh;
    for (int iter = 0; iter < 10000; ++iter) {
        double diff = 0.0;
        for (int b = 0; b < n2; ++b) {
            for (int a = 0; a < n1; ++a) {
                double acc = eps_cache[static_cast<std::size_t>(b) * n1 + a];
                for (const auto& w : m.ar_weights) {
                    double v = value(cur, a - w.s[0], b - w.s[1]);
                    acc += w.a * (tanh_update ? std::tanh(v) : v);
                }
                std::size_t idx = static_cast<std::size_t>(b) * n1 + a;
                diff = std::max(diff, std::abs(acc - cur[idx]));
                nxt[idx] = acc;
            }
        }
        cur.swap(nxt);
        if (diff < 1e-10) break;
    }
    return cur;
}

// Value of the (mean-free) field at one site under an arbitrary innovation table.
double value_at(const FieldModel& m, int64_t t1, int64_t t2, const EpsFn& eps) {
    switch (m.kind) {
        case FieldModel::Kind::WhiteNoise:
            return eps(t1, t2);
        case FieldModel::Kind::LinearMA: {
            double acc = 0.0;
            for (const auto& c : m.ma_coeffs) acc += c.a * eps(t1 - c.s[0], t2 - c.s[1]);
            return acc;
        }
        case FieldModel::Kind::Volterra2: {
            double acc = 0.0;
            for (const auto& c : m.volterra_coeffs)
                acc += c.a * eps(t1 - c.s1[0], t2 - c.s1[1]) * eps(t1 - c.s2[0], t2 - c.s2[1]);
            return acc;
        }
        case FieldModel::Kind::NonlinearAR: {
            const int mrg = ar_margin(m);
            auto grid = ar_fixed_point(m, eps, t1 - mrg, t1 + mrg, t2 - mrg, t2 + mrg);
            return grid[static_cast<std::size_t>(mrg) * (2 * mrg + 1) + mrg];
        }
    }
    return 0.0;
}

// Fills the whole lattice in one pass (amortizes innovation draws and, for the
// AR model, runs a single sweep over the expanded box instead of one per site).
FieldGrid realize(const FieldModel& m, const LatticeSpec& spec, const EpsFn& eps) {
    FieldGrid out(spec);
    if (m.kind == FieldModel::Kind::NonlinearAR) {
        const int mrg = ar_margin(m);
        auto grid = ar_fixed_point(m, eps, 1 - mrg, spec.d1 + mrg, 1 - mrg, spec.d2 + mrg);
        const int n1 = spec.d1 + 2 * mrg;
        for (int t2 = 1; t2 <= spec.d2; ++t2)
            for (int t1 = 1; t1 <= spec.d1; ++t1)
                out.at(t1, t2) =
                    m.mean + grid[static_cast<std::size_t>(t2 - 1 + mrg) * n1 + (t1 - 1 + mrg)];
        return out;
    }
    for (int t2 = 1; t2 <= spec.d2; ++t2)
        for (int t1 = 1; t1 <= spec.d1; ++t1) out.at(t1, t2) = m.mean + value_at(m, t1, t2, eps);
    return out;
}

// Materialized innovations over the support hull of the lattice, so stencil
// evaluations become array lookups.
struct EpsTable {
    int64_t lo1, lo2;
    int n1, n2;
    std::vector<double> v;

    double at(int64_t i1, int64_t i2) const {
        return v[static_cast<std::size_t>(i2 - lo2) * n1 + (i1 - lo1)];
    }
};

EpsTable materialize(const FieldModel& m, const LatticeSpec& spec, uint64_t seed, uint64_t stream) {
    int64_t lo1 = 1, hi1 = spec.d1, lo2 = 1, hi2 = spec.d2;
    auto extend = [&](int s1, int s2) {
        lo1 = std::min<int64_t>(lo1, 1 - s1);
        hi1 = std::max<int64_t>(hi1, spec.d1 - s1);
        lo2 = std::min<int64_t>(lo2, 1 - s2);
        hi2 = std::max<int64_t>(hi2, spec.d2 - s2);
    };
    if (m.kind == FieldModel::Kind::LinearMA)
        for (const auto& c : m.ma_coeffs) extend(c.s[0], c.s[1]);
    if (m.kind == FieldModel::Kind::Volterra2)
        for (const auto& c : m.volterra_coeffs) {
            extend(c.s1[0], c.s1[1]);
            extend(c.s2[0], c.s2[1]);
        }
    if (m.kind == FieldModel::Kind::NonlinearAR) {
        int mrg = ar_margin(m);
        lo1 = 1 - mrg;
        hi1 = spec.d1 + mrg;
        lo2 = 1 - mrg;
        hi2 = spec.d2 + mrg;
    }
    EpsTable t;
    t.lo1 = lo1;
    t.lo2 = lo2;
    t.n1 = static_cast<int>(hi1 - lo1 + 1);
    t.n2 = static_cast<int>(hi2 - lo2 + 1);
    t.v.resize(static_cast<std::size_t>(t.n1) * t.n2);
    for (int b = 0; b < t.n2; ++b)
        for (int a = 0; a < t.n1; ++a)
            t.v[static_cast<std::size_t>(b) * t.n1 + a] =
                m.innovation.sample(seed, stream, lo1 + a, lo2 + b);
    return t;
}

}  // namespace

FieldGrid simulate(const FieldModel& model, const LatticeSpec& spec, uint64_t seed) {
    model.validate();
    EpsTable eps = materialize(model, spec, seed, 0);
    return realize(model, spec, [&](int64_t i1, int64_t i2) { return eps.at(i1, i2); });
}

std::pair<FieldGrid, FieldGrid> coupled_simulate(const FieldModel& model, const LatticeSpec& spec,
                                                 uint64_t seed, CouplingMode mode) {
    model.validate();
    EpsTable eps = materialize(model, spec, seed, 0);
    FieldGrid v = realize(model, spec, [&](int64_t i1, int64_t i2) { return eps.at(i1, i2); });

    FieldGrid vc(spec);
    if (mode == CouplingMode::ReplaceOrigin) {
        const double eps0_tilde = model.innovation.sample(seed, 1, 0, 0);
        vc = realize(model, spec, [&](int64_t i1, int64_t i2) {
            if (i1 == 0 && i2 == 0) return eps0_tilde;
            return eps.at(i1, i2);
        });
    } else {
        // ReplaceFar: per target site j, keep eps at positions i with
        // ||j - i|| < ||j||, replace the rest with the independent copy.
        for (int t2 = 1; t2 <= spec.d2; ++t2) {
            for (int t1 = 1; t1 <= spec.d1; ++t1) {
                const int r = max_norm(t1, t2);
                auto coupled = [&](int64_t i1, int64_t i2) {
                    if (max_norm(static_cast<int>(t1 - i1), static_cast<int>(t2 - i2)) < r)
                        return eps.at(i1, i2);
                    return model.innovation.sample(seed, 1, i1, i2);
                };
                vc.at(t1, t2) = model.mean + value_at(model, t1, t2, coupled);
            }
        }
    }
    return {std::move(v), std::move(vc)};
}

std::vector<double> gmc_decay_estimate(const FieldModel& model, const LatticeSpec& spec,
                                       const std::vector<int>& radii, int reps, double alpha,
                                       uint64_t seed) {
    model.validate();
    if (!(alpha > 0.0)) throw std::invalid_argument("gmc_decay_estimate: alpha must be > 0");
    for (int r : radii)
        if (r < 0 || r > std::max(spec.d1, spec.d2))
            throw std::invalid_argument("gmc_decay_estimate: radius outside expanded lattice");

    std::vector<double> acc(radii.size(), 0.0);
    for (int rep = 0; rep < reps; ++rep) {
        const uint64_t s = split_seed(seed, static_cast<uint64_t>(rep));
        auto plain = [&](int64_t i1, int64_t i2) { return model.innovation.sample(s, 0, i1, i2); };
        for (std::size_t k = 0; k < radii.size(); ++k) {
            const int64_t j1 = radii[k], j2 = 0;
            const int r = max_norm(static_cast<int>(j1), 0);
            auto coupled = [&](int64_t i1, int64_t i2) {
                if (max_norm(static_cast<int>(j1 - i1), static_cast<int>(j2 - i2)) < r)
                    return model.innovation.sample(s, 0, i1, i2);
                return model.innovation.sample(s, 1, i1, i2);
            };
            double dv = value_at(model, j1, j2, plain) - value_at(model, j1, j2, coupled);
            acc[k] += std::pow(std::abs(dv), alpha);
        }
    }
    for (double& a : acc) a /= reps;
    return acc;
}

double theoretical_spectrum(const FieldModel& model, double l1, double l2) {
    const double norm = 4.0 * std::numbers::pi * std::numbers::pi;
    switch (model.kind) {
        case FieldModel::Kind::WhiteNoise:
            return model.innovation.variance() / norm;
        case FieldModel::Kind::LinearMA: {
            std::complex<double> transfer{0.0, 0.0};
            for (const auto& c : model.ma_coeffs) {
                double phase = -(c.s[0] * l1 + c.s[1] * l2);
                transfer += c.a * std::complex<double>{std::cos(phase), std::sin(phase)};
            }
            return model.innovation.variance() * std::norm(transfer) / norm;
        }
        default:
            throw std::invalid_argument("theoretical_spectrum: no closed form for this model");
    }
}

double theoretical_autocovariance(const FieldModel& model, int h1, int h2) {
    switch (model.kind) {
        case FieldModel::Kind::WhiteNoise:
            return (h1 == 0 && h2 == 0) ? model.innovation.variance() : 0.0;
        case FieldModel::Kind::LinearMA: {
            double acc = 0.0;
            for (const auto& c : model.ma_coeffs)
                for (const auto& c2 : model.ma_coeffs)
                    if (c2.s[0] == c.s[0] + h1 && c2.s[1] == c.s[1] + h2) acc += c.a * c2.a;
            return model.innovation.variance() * acc;
        }
        default:
            throw std::invalid_argument("theoretical_autocovariance: no closed form for this model");
    }
}

namespace {

const nlohmann::json& require_field(const nlohmann::json& j, const char* name,
                                    const char* context) {
    auto it = j.find(name);
    if (it == j.end())
        throw ConfigError(std::string("missing field '") + name + "' in " + context);
    return *it;
}

std::array<int, 2> parse_site(const nlohmann::json& j, const char* name) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw ConfigError(std::string("field '") + name + "' must be an integer pair");
    return {j[0].get<int>(), j[1].get<int>()};
}

InnovationSpec innovation_from_json(const nlohmann::json& j) {
    InnovationSpec spec;
    std::string dist = require_field(j, "distribution", "innovation").get<std::string>();
    if (dist == "Gaussian") {
        spec.dist = InnovationSpec::Dist::Gaussian;
        spec.sigma = j.value("sigma", 1.0);
    } else if (dist == "Uniform") {
        spec.dist = InnovationSpec::Dist::Uniform;
        spec.halfwidth = j.value("halfwidth", 1.0);
    } else if (dist == "StudentT") {
        spec.dist = InnovationSpec::Dist::StudentT;
        spec.nu = j.value("nu", 9.0);
        spec.scale = j.value("scale", 1.0);
        spec.allow_low_nu = j.value("allow_low_nu", false);
    } else {
        throw ConfigError("innovation field 'distribution' must be Gaussian, Uniform or StudentT");
    }
    spec.seed = j.value("seed", 0ULL);
    return spec;
}

}  // namespace

FieldModel model_from_json(const nlohmann::json& j) {
    FieldModel m;
    std::string variant = require_field(j, "variant", "model").get<std::string>();
    m.mean = j.value("mean", 0.0);
    m.innovation = innovation_from_json(require_field(j, "innovation", "model"));
    if (variant == "WhiteNoise") {
        m.kind = FieldModel::Kind::WhiteNoise;
    } else if (variant == "LinearMA") {
        m.kind = FieldModel::Kind::LinearMA;
        for (const auto& c : require_field(j, "coefficients", "LinearMA model")) {
            Coeff2 coeff;
            coeff.s = parse_site(require_field(c, "s", "coefficient entry"), "s");
            coeff.a = require_field(c, "a", "coefficient entry").get<double>();
            m.ma_coeffs.push_back(coeff);
        }
    } else if (variant == "Volterra2") {
        m.kind = FieldModel::Kind::Volterra2;
        for (const auto& c : require_field(j, "volterra", "Volterra2 model")) {
            VolterraCoeff coeff;
            coeff.s1 = parse_site(require_field(c, "s1", "volterra entry"), "s1");
            coeff.s2 = parse_site(require_field(c, "s2", "volterra entry"), "s2");
            coeff.a = require_field(c, "a", "volterra entry").get<double>();
            m.volterra_coeffs.push_back(coeff);
        }
    } else if (variant == "NonlinearAR") {
        m.kind = FieldModel::Kind::NonlinearAR;
        const auto& ar = require_field(j, "ar", "NonlinearAR model");
        std::string update = ar.value("update", std::string("affine"));
        if (update == "affine")
            m.ar_update = FieldModel::ArUpdate::Affine;
        else if (update == "tanh")
            m.ar_update = FieldModel::ArUpdate::Tanh;
        else
            throw ConfigError("field 'ar.update' must be 'affine' or 'tanh'");
        for (const auto& c : require_field(ar, "weights", "NonlinearAR model")) {
            Coeff2 w;
            w.s = parse_site(require_field(c, "s", "ar weight entry"), "s");
            w.a = require_field(c, "u", "ar weight entry").get<double>();
            m.ar_weights.push_back(w);
        }
    } else {
        throw ConfigError("model field 'variant' must be WhiteNoise, LinearMA, Volterra2 or NonlinearAR");
    }
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid model: ") + e.what());
    }
    return m;
}

FieldModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        throw ConfigError("malformed JSON in " + path + " at line " + std::to_string(line) + ": " +
                          e.what());
    }
    return model_from_json(j);
}

void write_field_csv(const FieldGrid& field, std::ostream& os) {
    os << "t1,t2,value\n";
    char buf[64];
    for (int t2 = 1; t2 <= field.spec.d2; ++t2)
        for (int t1 = 1; t1 <= field.spec.d1; ++t1) {
            std::snprintf(buf, sizeof buf, "%.17g", field.at(t1, t2));
            os << t1 << ',' << t2 << ',' << buf << '\n';
        }
}

FieldGrid read_field_csv(std::istream& is, std::optional<LatticeSpec> declared) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("field CSV: empty file");
    if (line.ends_with('\r')) line.pop_back();
    if (line != "t1,t2,value") throw ConfigError("field CSV: expected header 't1,t2,value'");

    std::vector<std::tuple<int, int, double>> rows;
    int max1 = 0, max2 = 0;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.ends_with('\r')) line.pop_back();
        if (line.empty()) continue;
        int t1 = 0, t2 = 0;
        double v = 0.0;
        if (std::sscanf(line.c_str(), "%d,%d,%lf", &t1, &t2, &v) != 3)
            throw ConfigError("field CSV: bad row at line " + std::to_string(lineno));
        if (t1 < 1 || t2 < 1)
            throw ConfigError("field CSV: indices must be >= 1 at line " + std::to_string(lineno));
        rows.emplace_back(t1, t2, v);
        max1 = std::max(max1, t1);
        max2 = std::max(max2, t2);
    }
    LatticeSpec spec = declared.value_or(LatticeSpec(std::max(max1, 2), std::max(max2, 2)));
    if (max1 > spec.d1 || max2 > spec.d2 ||
        rows.size() != static_cast<std::size_t>(spec.size()))
        throw ConfigError("field CSV: shape mismatch, got " + std::to_string(rows.size()) +
                          " rows with max index (" + std::to_string(max1) + "," +
                          std::to_string(max2) + ") for lattice " + std::to_string(spec.d1) + "x" +
                          std::to_string(spec.d2));
    FieldGrid field(spec);
    std::vector<bool> seen(static_cast<std::size_t>(spec.size()), false);
    for (auto& [t1, t2, v] : rows) {
        std::size_t off = grid_offset(spec, t1, t2);
        if (seen[off]) throw ConfigError("field CSV: duplicate site");
        seen[off] = true;
        field.values[off] = v;
    }
    return field;
}

}  // namespace latspec

#include "latspec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <thread>

#include "latspec/errors.hpp"
#include "latspec/rng.hpp"

namespace latspec {

namespace {
constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;
constexpr double kTwoPiSq = 2.0 * std::numbers::pi * std::numbers::pi;
}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double stat_thm2a(const FourierTable& table, const SpectrumFn& f) {
    const Partition part = build_partition(table.spec);
    double acc = 0.0;
    for (FreqIndex j : part.n_set) {
        auto [l1, l2] = frequency(table.spec, j.j1, j.j2);
        const std::size_t off = grid_offset(table.spec, j.j1, j.j2);
        acc += (table.x[off] + table.y[off]) / std::sqrt(f(l1, l2));
    }
    return acc / (2.0 * static_cast<double>(part.n_set.size()));
}

double stat_thm2c(const PeriodogramGrid& pg, const SpectrumFn& f) {
    const Partition part = build_partition(pg.spec);
    double acc = 0.0;
    for (FreqIndex j : part.n_set) {
        auto [l1, l2] = frequency(pg.spec, j.j1, j.j2);
        acc += pg.i_values[grid_offset(pg.spec, j.j1, j.j2)] / f(l1, l2);
    }
    return acc / (kFourPiSq * static_cast<double>(part.n_set.size()));
}

double stat_thm2d(const PeriodogramGrid& pg, const SpectrumFn& f) {
    const Partition part = build_partition(pg.spec);
    double acc = 0.0;
    for (FreqIndex j : part.n_set) {
        auto [l1, l2] = frequency(pg.spec, j.j1, j.j2);
        const double r = pg.i_values[grid_offset(pg.spec, j.j1, j.j2)] / f(l1, l2);
        acc += r * r;
    }
    return acc / static_cast<double>(part.n_set.size());
}

double stat_thm2e(const PeriodogramGrid& pg, const SpectrumFn& f, double q) {
    const Partition part = build_partition(pg.spec);
    double acc = 0.0;
    for (FreqIndex j : part.n_set) {
        auto [l1, l2] = frequency(pg.spec, j.j1, j.j2);
        acc += std::pow(pg.i_values[grid_offset(pg.spec, j.j1, j.j2)] / f(l1, l2), q);
    }
    return acc / static_cast<double>(part.n_set.size());
}

double stat_coro1_ks(const FourierTable& table, const SpectrumFn& f,
                     const std::vector<double>& weights) {
    const Partition part = build_partition(table.spec);
    const std::size_t n = part.n_set.size();
    if (!weights.empty()) {
        if (weights.size() != n)
            throw std::invalid_argument("stat_coro1_ks: weight list must have one entry per j in N");
        double sum = 0.0;
        for (double w : weights) sum += w;
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("stat_coro1_ks: weights must sum to 1");
    }
    std::vector<std::pair<double, double>> atoms;  // (z, mass)
    atoms.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const FreqIndex j = part.n_set[i];
        auto [l1, l2] = frequency(table.spec, j.j1, j.j2);
        const double denom = std::sqrt(kTwoPiSq * f(l1, l2));
        const double w = (weights.empty() ? 1.0 / static_cast<double>(n) : weights[i]) / 2.0;
        const std::size_t off = grid_offset(table.spec, j.j1, j.j2);
        atoms.emplace_back(table.x[off] / denom, w);
        atoms.emplace_back(table.y[off] / denom, w);
    }
    std::sort(atoms.begin(), atoms.end());
    // Sup of |F_hat - Phi| is attained at a jump; check both sides of each.
    double ks = 0.0, cum = 0.0;
    for (auto [z, w] : atoms) {
        const double phi = normal_cdf(z);
        ks = std::max(ks, std::abs(cum - phi));
        cum += w;
        ks = std::max(ks, std::abs(cum - phi));
    }
    return ks;
}

double stat_thm3(const FourierTable& table, const PeriodogramGrid& pg, const WeightTable& weights,
                 Thm3Which which, const SpectrumFn& f, double q) {
    const LatticeSpec& spec = pg.spec;
    const Partition part = build_partition(spec);

    std::vector<double> base(static_cast<std::size_t>(spec.size()));
    switch (which) {
        case Thm3Which::A:
            for (std::size_t i = 0; i < base.size(); ++i) base[i] = table.x[i] + table.y[i];
            break;
        case Thm3Which::B:
            base = pg.i_values;
            break;
        case Thm3Which::C:
            for (std::size_t i = 0; i < base.size(); ++i) base[i] = pg.i_values[i] * pg.i_values[i];
            break;
        case Thm3Which::D:
            for (std::size_t i = 0; i < base.size(); ++i) base[i] = std::pow(pg.i_values[i], q);
            break;
    }
    const auto smoothed = smooth_periodic(spec, weights, base);
    double sup = 0.0;
    for (FreqIndex j : part.n_set) {
        const double s = smoothed[grid_offset(spec, j.j1, j.j2)];
        if (which == Thm3Which::B) {
            auto [l1, l2] = frequency(spec, j.j1, j.j2);
            sup = std::max(sup, std::abs(s - kFourPiSq * f(l1, l2)));
        } else if (which == Thm3Which::A) {
            sup = std::max(sup, std::abs(s));
        } else {
            sup = std::max(sup, s);
        }
    }
    return sup;
}

double stat_thm4_sup(const SpectralEstimate& estimate, const SpectrumFn& f_true) {
    double sup = 0.0;
    for (const auto& r : estimate.rows)
        sup = std::max(sup, std::abs(r.f_hat - f_true(r.l1, r.l2)));
    return sup;
}

// ---- experiment engine --------------------------------------------------

const std::vector<std::string> kStatisticNames = {
    "thm2a", "thm2c", "thm2d", "thm2e",   "coro1_ks", "thm3a",
    "thm3b", "thm3c", "thm3d", "thm4_sup", "thm5_suite", "gmc"};

KernelSpec ExperimentConfig::kernel_for(const LatticeSpec& spec) const {
    if (bandwidth) return {kernel_family, bandwidth->first, bandwidth->second};
    if (bandwidth_pow)
        return {kernel_family, std::pow(static_cast<double>(spec.d1), -*bandwidth_pow),
                std::pow(static_cast<double>(spec.d2), -*bandwidth_pow)};
    throw ConfigError("experiment config: kernel bandwidth missing (pair or pow rule)");
}

void ExperimentConfig::validate() const {
    if (replications < 1) throw ConfigError("experiment config: replications must be >= 1");
    if (lattices.empty()) throw ConfigError("experiment config: no lattices given");
    for (const auto& s : lattices) {
        const double ratio =
            static_cast<double>(std::max(s.d1, s.d2)) / static_cast<double>(std::min(s.d1, s.d2));
        if (ratio > 8.0)
            throw ConfigError("experiment config: lattice aspect ratio > 8 (P1 proxy)");
    }
    if (statistics.empty()) throw ConfigError("experiment config: no statistics requested");
    for (const auto& name : statistics) {
        if (std::find(kStatisticNames.begin(), kStatisticNames.end(), name) ==
            kStatisticNames.end()) {
            std::string valid;
            for (const auto& v : kStatisticNames) valid += (valid.empty() ? "" : ", ") + v;
            throw ConfigError("unknown statistic '" + name + "' (valid: " + valid + ")");
        }
    }
    if (!weights_coro1.empty()) {
        double sum = 0.0;
        for (double w : weights_coro1) sum += w;
        if (std::abs(sum - 1.0) > 1e-9)
            throw ConfigError("experiment config: coro1 weights must sum to 1");
    }
    if (!(q > 0.0)) throw ConfigError("experiment config: q must be > 0");
}

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LATTICESPEC_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

bool needs_spectrum(const std::string& s) {
    return s == "thm2a" || s == "thm2c" || s == "thm2d" || s == "thm2e" || s == "coro1_ks" ||
           s == "thm3b" || s == "thm4_sup" || s == "thm5_suite";
}

bool needs_weights(const std::string& s) { return s.starts_with("thm3") || s == "thm5_suite"; }

bool needs_transform(const std::string& s) { return s != "gmc" && s != "thm5_suite"; }

// Names of the per-replication output rows a statistic expands to.
std::vector<std::string> expand_names(const std::string& s) {
    if (s == "thm5_suite")
        return {"thm5_mse", "thm5_a_sup", "thm5_b1", "thm5_b2", "thm5_b3",
                "thm5_b4",  "thm5_c1",    "thm5_c2", "thm5_c3", "thm5_c4"};
    return {s};
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    config.model.validate();
    const auto t0 = std::chrono::steady_clock::now();

    ExperimentReport report;
    report.config_echo = config_to_json(config);

    const bool any_n_stat = std::any_of(config.statistics.begin(), config.statistics.end(),
                                        [](const std::string& s) { return s != "gmc"; });
    const bool want_f = std::any_of(config.statistics.begin(), config.statistics.end(),
                                    [](const std::string& s) { return needs_spectrum(s); });

    for (const LatticeSpec& spec : config.lattices) {
        const Partition part = build_partition(spec);
        if (any_n_stat && part.n_set.empty())
            throw ConfigError("experiment config: lattice has empty N set; statistics over N undefined");
        const bool low_n = part.n_set.size() < 8;

        SpectrumFn f;
        if (want_f) {
            const FieldModel& m = config.model;
            f = [&m](double l1, double l2) { return theoretical_spectrum(m, l1, l2); };
        }
        std::optional<KernelSpec> kernel;
        std::optional<WeightTable> weights;
        const bool want_kernel = std::any_of(config.statistics.begin(), config.statistics.end(),
                                             [](const std::string& s) {
                                                 return needs_weights(s) || s == "thm4_sup";
                                             });
        if (want_kernel) {
            kernel = config.kernel_for(spec);
            weights = build_weights(spec, *kernel);
        }

        // Per-rep evaluation of every requested statistic, slot-assembled so
        // results do not depend on thread scheduling.
        std::vector<std::string> row_names;
        for (const auto& s : config.statistics)
            if (s != "gmc")
                for (auto& n : expand_names(s)) row_names.push_back(n);

        const int reps = config.replications;
        std::vector<std::vector<double>> values(row_names.size(),
                                                std::vector<double>(static_cast<std::size_t>(reps)));

        auto run_rep = [&](int rep) {
            const uint64_t rep_seed = split_seed(config.seed, static_cast<uint64_t>(rep));
            const FieldGrid field = simulate(config.model, spec, rep_seed);

            std::optional<FourierTable> table;
            std::optional<PeriodogramGrid> pg;
            const bool want_transform =
                std::any_of(config.statistics.begin(), config.statistics.end(),
                            [](const std::string& s) { return needs_transform(s); });
            if (want_transform) {
                table = fourier_coefficients(field);
                pg = periodogram(*table);
            }

            std::size_t slot = 0;
            for (const auto& s : config.statistics) {
                if (s == "gmc") continue;
                if (s == "thm2a") values[slot++][rep] = stat_thm2a(*table, f);
                else if (s == "thm2c") values[slot++][rep] = stat_thm2c(*pg, f);
                else if (s == "thm2d")
                    values[slot++][rep] = stat_thm2d(*pg, f) / (2.0 * kFourPiSq * kFourPiSq);
                else if (s == "thm2e") values[slot++][rep] = stat_thm2e(*pg, f, config.q);
                else if (s == "coro1_ks")
                    values[slot++][rep] = stat_coro1_ks(*table, f, config.weights_coro1);
                else if (s == "thm3a")
                    values[slot++][rep] = stat_thm3(*table, *pg, *weights, Thm3Which::A, f, config.q);
                else if (s == "thm3b")
                    values[slot++][rep] = stat_thm3(*table, *pg, *weights, Thm3Which::B, f, config.q);
                else if (s == "thm3c")
                    values[slot++][rep] = stat_thm3(*table, *pg, *weights, Thm3Which::C, f, config.q);
                else if (s == "thm3d")
                    values[slot++][rep] = stat_thm3(*table, *pg, *weights, Thm3Which::D, f, config.q);
                else if (s == "thm4_sup") {
                    const auto est_f = estimate_on_grid(*pg, *kernel, GridSpec::fourier());
                    const auto est_u = estimate_on_grid(*pg, *kernel, GridSpec::uniform(64));
                    values[slot++][rep] = std::max(stat_thm4_sup(est_f, f), stat_thm4_sup(est_u, f));
                } else if (s == "thm5_suite") {
                    if (config.trend_coefficients.empty())
                        throw ConfigError("thm5_suite requires trend coefficients");
                    FieldGrid y = field;
                    const FieldGrid trend = polynomial_trend(spec, config.trend_coefficients);
                    for (std::size_t i = 0; i < y.values.size(); ++i)
                        y.values[i] += trend.values[i];
                    const DetrendResult det = detrend_least_squares(y, config.detrend_degree);
                    const EstimatedFieldReport r =
                        estimated_field_report(field, det.v_hat, *kernel, *weights, f, config.q);
                    values[slot++][rep] = r.mse;
                    values[slot++][rep] = r.sup_fhat_diff;
                    values[slot++][rep] = r.b1;
                    values[slot++][rep] = r.b2;
                    values[slot++][rep] = r.b3;
                    values[slot++][rep] = r.b4;
                    values[slot++][rep] = r.c1;
                    values[slot++][rep] = r.c2;
                    values[slot++][rep] = r.c3;
                    values[slot++][rep] = r.c4;
                }
            }
        };

        const int nthreads = std::min(resolve_threads(config.threads), reps);
        if (nthreads <= 1) {
            for (int rep = 0; rep < reps; ++rep) run_rep(rep);
        } else {
            std::atomic<int> next{0};
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nthreads));
            for (int t = 0; t < nthreads; ++t)
                pool.emplace_back([&, t] {
                    try {
                        for (int rep = next.fetch_add(1); rep < reps; rep = next.fetch_add(1))
                            run_rep(rep);
                    } catch (...) {
                        errors[static_cast<std::size_t>(t)] = std::current_exception();
                    }
                });
            for (auto& th : pool) th.join();
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }

        for (std::size_t k = 0; k < row_names.size(); ++k) {
            StatRow row(spec, row_names[k]);
            row.reps = reps;
            row.low_n = low_n;
            double mean = 0.0;
            for (double v : values[k]) mean += v;
            mean /= reps;
            row.estimate = mean;
            if (reps > 1) {
                double ss = 0.0;
                for (double v : values[k]) ss += (v - mean) * (v - mean);
                row.se = std::sqrt(ss / (reps - 1)) / std::sqrt(static_cast<double>(reps));
            }
            row.median = median_of(values[k]);
            if (config.emit_values) row.values = values[k];
            report.rows.push_back(std::move(row));
        }

        if (std::find(config.statistics.begin(), config.statistics.end(), "gmc") !=
            config.statistics.end()) {
            const auto means = gmc_decay_estimate(config.model, spec, config.gmc_radii,
                                                  config.replications, config.gmc_alpha, config.seed);
            double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
            const int n = static_cast<int>(config.gmc_radii.size());
            for (int i = 0; i < n; ++i) {
                StatRow row(spec, "gmc_r" + std::to_string(config.gmc_radii[i]));
                row.estimate = row.median = means[static_cast<std::size_t>(i)];
                row.reps = config.replications;
                report.rows.push_back(std::move(row));
                const double x = config.gmc_radii[i], y = std::log(means[static_cast<std::size_t>(i)]);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            StatRow slope(spec, "gmc_slope");
            slope.estimate = slope.median = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            slope.reps = config.replications;
            report.rows.push_back(std::move(slope));
        }
    }

    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

const StatRow* ExperimentReport::find(const std::string& statistic,
                                      const LatticeSpec& lattice) const {
    for (const auto& row : rows)
        if (row.statistic == statistic && row.lattice == lattice) return &row;
    return nullptr;
}

// ---- config / report serialization --------------------------------------

namespace {

nlohmann::json innovation_to_json(const InnovationSpec& s) {
    nlohmann::json j;
    switch (s.dist) {
        case InnovationSpec::Dist::Gaussian:
            j["distribution"] = "Gaussian";
            j["sigma"] = s.sigma;
            break;
        case InnovationSpec::Dist::Uniform:
            j["distribution"] = "Uniform";
            j["halfwidth"] = s.halfwidth;
            break;
        case InnovationSpec::Dist::StudentT:
            j["distribution"] = "StudentT";
            j["nu"] = s.nu;
            j["scale"] = s.scale;
            j["allow_low_nu"] = s.allow_low_nu;
            break;
    }
    j["seed"] = s.seed;
    return j;
}

nlohmann::json model_to_json(const FieldModel& m) {
    nlohmann::json j;
    j["mean"] = m.mean;
    j["innovation"] = innovation_to_json(m.innovation);
    switch (m.kind) {
        case FieldModel::Kind::WhiteNoise:
            j["variant"] = "WhiteNoise";
            break;
        case FieldModel::Kind::LinearMA: {
            j["variant"] = "LinearMA";
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& c : m.ma_coeffs) arr.push_back({{"s", {c.s[0], c.s[1]}}, {"a", c.a}});
            j["coefficients"] = arr;
            break;
        }
        case FieldModel::Kind::Volterra2: {
            j["variant"] = "Volterra2";
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& c : m.volterra_coeffs)
                arr.push_back({{"s1", {c.s1[0], c.s1[1]}}, {"s2", {c.s2[0], c.s2[1]}}, {"a", c.a}});
            j["volterra"] = arr;
            break;
        }
        case FieldModel::Kind::NonlinearAR: {
            j["variant"] = "NonlinearAR";
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& c : m.ar_weights) arr.push_back({{"s", {c.s[0], c.s[1]}}, {"u", c.a}});
            j["ar"] = {{"update", m.ar_update == FieldModel::ArUpdate::Affine ? "affine" : "tanh"},
                       {"weights", arr}};
            break;
        }
    }
    return j;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& base_dir) {
    ExperimentConfig cfg;
    if (j.contains("model_file")) {
        std::string path = j["model_file"].get<std::string>();
        if (!base_dir.empty() && !path.starts_with('/')) path = base_dir + "/" + path;
        cfg.model = load_model_file(path);
    } else if (j.contains("model")) {
        cfg.model = model_from_json(j["model"]);
    } else {
        throw ConfigError("experiment config: missing 'model' or 'model_file'");
    }

    if (!j.contains("lattices")) throw ConfigError("experiment config: missing 'lattices'");
    for (const auto& l : j["lattices"]) {
        if (!l.is_array() || l.size() != 2)
            throw ConfigError("experiment config: each lattice must be [d1, d2]");
        try {
            cfg.lattices.emplace_back(l[0].get<int>(), l[1].get<int>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("experiment config: ") + e.what());
        }
    }

    if (j.contains("kernel")) {
        const auto& k = j["kernel"];
        cfg.kernel_family =
            kernel_family_from_name(k.value("family", std::string("epanechnikov")));
        if (k.contains("bandwidth")) {
            const auto& b = k["bandwidth"];
            if (!b.is_array() || b.size() != 2)
                throw ConfigError("experiment config: kernel.bandwidth must be [h1, h2]");
            cfg.bandwidth = {b[0].get<double>(), b[1].get<double>()};
        } else if (k.contains("bandwidth_rule")) {
            const std::string rule = k["bandwidth_rule"].get<std::string>();
            if (!rule.starts_with("pow:"))
                throw ConfigError("experiment config: bandwidth_rule must be 'pow:<beta>'");
            cfg.bandwidth_pow = std::stod(rule.substr(4));
        }
    }

    cfg.replications = j.value("replications", 1);
    cfg.seed = j.value("seed", 1ULL);
    if (!j.contains("statistics")) throw ConfigError("experiment config: missing 'statistics'");
    for (const auto& s : j["statistics"]) cfg.statistics.push_back(s.get<std::string>());

    if (j.contains("weights_coro1") && j["weights_coro1"].is_array())
        for (const auto& w : j["weights_coro1"]) cfg.weights_coro1.push_back(w.get<double>());
    cfg.q = j.value("q", 4.5);
    if (j.contains("trend")) {
        const auto& t = j["trend"];
        cfg.detrend_degree = t.value("degree", 2);
        if (t.contains("coefficients"))
            for (const auto& c : t["coefficients"]) cfg.trend_coefficients.push_back(c.get<double>());
    }
    if (j.contains("gmc")) {
        const auto& g = j["gmc"];
        if (g.contains("radii")) {
            cfg.gmc_radii.clear();
            for (const auto& r : g["radii"]) cfg.gmc_radii.push_back(r.get<int>());
        }
        cfg.gmc_alpha = g.value("alpha", 2.0);
    }
    cfg.threads = j.value("threads", 0);
    cfg.emit_values = j.value("emit_values", false);
    cfg.validate();
    return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
    nlohmann::json j;
    j["model"] = model_to_json(config.model);
    nlohmann::json lat = nlohmann::json::array();
    for (const auto& s : config.lattices) lat.push_back({s.d1, s.d2});
    j["lattices"] = lat;
    nlohmann::json k;
    k["family"] = kernel_family_name(config.kernel_family);
    if (config.bandwidth) k["bandwidth"] = {config.bandwidth->first, config.bandwidth->second};
    if (config.bandwidth_pow) k["bandwidth_rule"] = "pow:" + std::to_string(*config.bandwidth_pow);
    j["kernel"] = k;
    j["replications"] = config.replications;
    j["seed"] = config.seed;
    j["statistics"] = config.statistics;
    if (!config.weights_coro1.empty()) j["weights_coro1"] = config.weights_coro1;
    j["q"] = config.q;
    if (!config.trend_coefficients.empty())
        j["trend"] = {{"degree", config.detrend_degree}, {"coefficients", config.trend_coefficients}};
    if (std::find(config.statistics.begin(), config.statistics.end(), "gmc") !=
        config.statistics.end())
        j["gmc"] = {{"radii", config.gmc_radii}, {"alpha", config.gmc_alpha}};
    return j;
}

nlohmann::json report_to_json(const ExperimentReport& report) {
    nlohmann::json j;
    j["config"] = report.config_echo;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json row;
        row["lattice"] = {r.lattice.d1, r.lattice.d2};
        row["statistic"] = r.statistic;
        row["estimate"] = r.estimate;
        if (r.se)
            row["se"] = *r.se;
        else
            row["se"] = nullptr;
        row["median"] = r.median;
        row["reps"] = r.reps;
        if (r.low_n) row["low_n"] = true;
        if (!r.values.empty()) row["values"] = r.values;
        rows.push_back(std::move(row));
    }
    j["results"] = rows;
    j["wall_clock_seconds"] = report.wall_clock_seconds;
    return j;
}

void write_report_csv(const ExperimentReport& report, std::ostream& os) {
    os << "d1,d2,statistic,estimate,se,median,reps\n";
    char buf[200];
    for (const auto& r : report.rows) {
        if (r.se)
            std::snprintf(buf, sizeof buf, "%d,%d,%s,%.17g,%.17g,%.17g,%d\n", r.lattice.d1,
                          r.lattice.d2, r.statistic.c_str(), r.estimate, *r.se, r.median, r.reps);
        else
            std::snprintf(buf, sizeof buf, "%d,%d,%s,%.17g,,%.17g,%d\n", r.lattice.d1, r.lattice.d2,
                          r.statistic.c_str(), r.estimate, r.median, r.reps);
        os << buf;
    }
}

}  // namespace latspec

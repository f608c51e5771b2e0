// latspec: simulate stationary lattice fields, compute their transforms and
// kernel spectral density estimates, and run the Monte Carlo experiment
// harness. Exit codes: 0 success, 1 runtime failure, 2 bad configuration.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "latspec/errors.hpp"
#include "latspec/estimators.hpp"
#include "latspec/fields.hpp"
#include "latspec/harness.hpp"
#include "latspec/kernels.hpp"
#include "latspec/lattice.hpp"
#include "latspec/spectra.hpp"

namespace {

using namespace latspec;

LatticeSpec parse_lattice(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos)
        throw ConfigError("lattice must be given as <d1>x<d2>, e.g. 64x64");
    try {
        return LatticeSpec(std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1)));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bad lattice: ") + e.what());
    }
}

KernelSpec parse_kernel(const std::string& name, const std::string& bandwidth,
                        const LatticeSpec& spec) {
    const KernelFamily family = kernel_family_from_name(name);
    if (bandwidth.starts_with("pow:")) {
        const double beta = std::stod(bandwidth.substr(4));
        return {family, std::pow(static_cast<double>(spec.d1), -beta),
                std::pow(static_cast<double>(spec.d2), -beta)};
    }
    const auto comma = bandwidth.find(',');
    if (comma == std::string::npos)
        throw ConfigError("bandwidth must be '<h1>,<h2>' or 'pow:<beta>'");
    try {
        return {family, std::stod(bandwidth.substr(0, comma)), std::stod(bandwidth.substr(comma + 1))};
    } catch (const std::invalid_argument&) {
        throw ConfigError("bandwidth must be '<h1>,<h2>' or 'pow:<beta>'");
    }
}

GridSpec parse_grid(const std::string& text) {
    if (text == "fourier") return GridSpec::fourier();
    if (text.starts_with("uniform:")) return GridSpec::uniform(std::stoi(text.substr(8)));
    throw ConfigError("grid must be 'fourier' or 'uniform:<m>'");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file: " + path);
    return os;
}

FieldGrid load_field(const std::string& path, const std::optional<LatticeSpec>& declared) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open field CSV: " + path);
    return read_field_csv(is, declared);
}

int cmd_simulate(const std::string& model_path, const std::string& lattice,
                 std::optional<uint64_t> seed, const std::string& out) {
    const FieldModel model = load_model_file(model_path);
    const LatticeSpec spec = parse_lattice(lattice);
    const uint64_t s = seed.value_or(model.innovation.seed);
    const FieldGrid field = simulate(model, spec, s);

    auto os = open_out(out);
    write_field_csv(field, os);

    double mean = 0.0;
    for (double v : field.values) mean += v;
    mean /= static_cast<double>(field.values.size());
    double var = 0.0;
    for (double v : field.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(field.values.size());
    std::cout << "simulated " << spec.d1 << "x" << spec.d2 << " field, seed " << s
              << ": mean = " << mean << ", variance = " << var << "\n";
    return 0;
}

int cmd_transform(const std::string& in, const std::optional<LatticeSpec>& lattice,
                  const std::string& out, const std::string& coeff_out) {
    const FieldGrid field = load_field(in, lattice);
    const FourierTable table = fourier_coefficients(field);
    const PeriodogramGrid pg = periodogram(table);
    auto os = open_out(out);
    write_periodogram_csv(pg, os);
    if (!coeff_out.empty()) {
        auto cs = open_out(coeff_out);
        cs << "j1,j2,x,y\n";
        char buf[120];
        for (int j2 = 1; j2 <= field.spec.d2; ++j2)
            for (int j1 = 1; j1 <= field.spec.d1; ++j1) {
                std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", j1, j2,
                              table.x_at(j1, j2), table.y_at(j1, j2));
                cs << buf;
            }
    }
    std::cout << "wrote periodogram for " << field.spec.d1 << "x" << field.spec.d2 << " field\n";
    return 0;
}

int cmd_estimate(const std::string& in, const std::optional<LatticeSpec>& lattice,
                 const std::string& kernel_name, const std::string& bandwidth,
                 const std::string& grid_text, const std::string& truth_path,
                 const std::string& out) {
    const FieldGrid field = load_field(in, lattice);
    const KernelSpec kernel = parse_kernel(kernel_name, bandwidth, field.spec);
    const GridSpec grid = parse_grid(grid_text);
    const PeriodogramGrid pg = periodogram(fourier_coefficients(field));
    const SpectralEstimate est = estimate_on_grid(pg, kernel, grid);
    auto os = open_out(out);
    if (!truth_path.empty()) {
        const FieldModel truth_model = load_model_file(truth_path);
        SpectrumFn truth = [truth_model](double l1, double l2) {
            return theoretical_spectrum(truth_model, l1, l2);
        };
        write_estimate_csv(est, os, &truth);
    } else {
        write_estimate_csv(est, os);
    }
    std::cout << "wrote " << est.rows.size() << " estimate rows\n";
    return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir, int threads) {
    std::ifstream is(config_path);
    if (!is) throw ConfigError("cannot open config file: " + config_path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        throw ConfigError("malformed JSON in " + config_path + " at line " + std::to_string(line) +
                          ": " + e.what());
    }
    const std::string base_dir = std::filesystem::path(config_path).parent_path().string();
    ExperimentConfig cfg = config_from_json(j, base_dir);
    if (threads > 0) cfg.threads = threads;

    const ExperimentReport report = run_experiment(cfg);
    std::filesystem::create_directories(out_dir);
    {
        auto os = open_out(out_dir + "/report.json");
        os << report_to_json(report).dump(2) << "\n";
    }
    {
        auto os = open_out(out_dir + "/report.csv");
        write_report_csv(report, os);
    }
    std::cout << "wrote " << report.rows.size() << " result rows to " << out_dir << " in "
              << report.wall_clock_seconds << " s\n";
    return 0;
}

int cmd_validate_kernel(const std::string& kernel_name, const std::string& bandwidth,
                        const std::string& lattice, const std::string& out) {
    const LatticeSpec spec = parse_lattice(lattice);
    const KernelSpec kernel = parse_kernel(kernel_name, bandwidth, spec);
    const KernelReport rep = validate_kernel(kernel, spec);
    nlohmann::json j = {{"kernel", kernel_family_name(kernel.family)},
                        {"bandwidth", {kernel.h1, kernel.h2}},
                        {"lattice", {spec.d1, spec.d2}},
                        {"k1_residual", rep.k1_residual},
                        {"k2_sup_scaled", rep.k2_sup_scaled},
                        {"k3_integral", rep.k3_integral},
                        {"k5_lipschitz_ratio", rep.k5_lipschitz_ratio},
                        {"k4_outside_mass", rep.k4_outside_mass}};
    std::cout << j.dump(2) << "\n";
    if (!out.empty()) {
        auto os = open_out(out);
        os << j.dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral analysis of stationary random fields on 2-D lattices"};
    app.require_subcommand(1);

    std::string model_path, lattice, in_path, out_path, coeff_out, kernel_name = "epanechnikov";
    std::string bandwidth = "0.4,0.4", grid_text = "fourier", truth_path, config_path, out_dir;
    std::optional<uint64_t> seed;
    std::string lattice_opt;
    int threads = 0;

    auto* sim = app.add_subcommand("simulate", "simulate a field model and write a CSV grid");
    sim->add_option("--model", model_path, "model JSON file")->required();
    sim->add_option("--lattice", lattice, "lattice as <d1>x<d2>")->required();
    sim->add_option("--seed", seed, "RNG seed (default: model file seed)");
    sim->add_option("--out", out_path, "output CSV path")->required();

    auto* tr = app.add_subcommand("transform", "periodogram (and coefficients) of a field CSV");
    tr->add_option("--in", in_path, "field CSV")->required();
    tr->add_option("--lattice", lattice_opt, "declared lattice <d1>x<d2> (default: inferred)");
    tr->add_option("--out", out_path, "periodogram CSV path")->required();
    tr->add_option("--coefficients", coeff_out, "also write Fourier coefficients CSV");

    auto* est = app.add_subcommand("estimate", "kernel spectral density estimate from a field CSV");
    est->add_option("--in", in_path, "field CSV")->required();
    est->add_option("--lattice", lattice_opt, "declared lattice <d1>x<d2> (default: inferred)");
    est->add_option("--kernel", kernel_name, "uniform | epanechnikov | gaussian");
    est->add_option("--bandwidth", bandwidth, "'<h1>,<h2>' or 'pow:<beta>'");
    est->add_option("--grid", grid_text, "'fourier' or 'uniform:<m>'");
    est->add_option("--truth", truth_path, "model JSON; adds f_true and abs_err columns");
    est->add_option("--out", out_path, "estimate CSV path")->required();

    auto* exp = app.add_subcommand("experiment", "run a Monte Carlo experiment config");
    exp->add_option("--config", config_path, "experiment JSON config")->required();
    exp->add_option("--out-dir", out_dir, "output directory for report.json/report.csv")->required();
    exp->add_option("--threads", threads, "worker cap (default: LATTICESPEC_THREADS or hardware)");

    auto* vk = app.add_subcommand("validate-kernel", "numerical probes of the kernel assumptions");
    vk->add_option("--kernel", kernel_name, "uniform | epanechnikov | gaussian");
    vk->add_option("--bandwidth", bandwidth, "'<h1>,<h2>' or 'pow:<beta>'");
    vk->add_option("--lattice", lattice, "lattice as <d1>x<d2>")->required();
    vk->add_option("--out", out_path, "also write the report JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        std::optional<latspec::LatticeSpec> declared;
        if (!lattice_opt.empty()) declared = parse_lattice(lattice_opt);
        if (sim->parsed()) return cmd_simulate(model_path, lattice, seed, out_path);
        if (tr->parsed()) return cmd_transform(in_path, declared, out_path, coeff_out);
        if (est->parsed())
            return cmd_estimate(in_path, declared, kernel_name, bandwidth, grid_text, truth_path,
                                out_path);
        if (exp->parsed()) return cmd_experiment(config_path, out_dir, threads);
        if (vk->parsed()) return cmd_validate_kernel(kernel_name, bandwidth, lattice, out_path);
    } catch (const latspec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

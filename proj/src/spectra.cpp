#include "latspec/spectra.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "latspec/fft.hpp"

namespace latspec {

FourierTable fourier_coefficients(const FieldGrid& field) {
    const LatticeSpec& spec = field.spec;
    const int d1 = spec.d1, d2 = spec.d2;
    std::vector<std::complex<double>> a(field.values.begin(), field.values.end());
    auto bins = fft_2d(a, d1, d2);

    // Standard FFTs index t from 0; the lattice indexes from 1, so bin (j1,j2)
    // picks up the extra phase exp(-i(2*pi*j1/d1 + 2*pi*j2/d2)).
    std::vector<std::complex<double>> ph1(d1 + 1), ph2(d2 + 1);
    for (int j = 1; j <= d1; ++j) {
        double t = -2.0 * std::numbers::pi * j / d1;
        ph1[j] = {std::cos(t), std::sin(t)};
    }
    for (int j = 1; j <= d2; ++j) {
        double t = -2.0 * std::numbers::pi * j / d2;
        ph2[j] = {std::cos(t), std::sin(t)};
    }

    FourierTable table(spec);
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.size()));
    for (int j2 = 1; j2 <= d2; ++j2) {
        for (int j1 = 1; j1 <= d1; ++j1) {
            std::complex<double> c =
                bins[static_cast<std::size_t>(j2 % d2) * d1 + (j1 % d1)] * ph1[j1] * ph2[j2] * scale;
            std::size_t off = grid_offset(spec, j1, j2);
            table.x[off] = c.real();
            table.y[off] = c.imag();
        }
    }
    return table;
}

FourierTable dft_naive_oracle(const FieldGrid& field) {
    const LatticeSpec& spec = field.spec;
    FourierTable table(spec);
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.size()));
    const double w1 = 2.0 * std::numbers::pi / spec.d1;
    const double w2 = 2.0 * std::numbers::pi / spec.d2;
    for (int j2 = 1; j2 <= spec.d2; ++j2) {
        for (int j1 = 1; j1 <= spec.d1; ++j1) {
            double re = 0.0, im = 0.0;
            for (int t2 = 1; t2 <= spec.d2; ++t2) {
                for (int t1 = 1; t1 <= spec.d1; ++t1) {
                    double arg = w1 * j1 * t1 + w2 * j2 * t2;
                    double v = field.at(t1, t2);
                    re += v * std::cos(arg);
                    im -= v * std::sin(arg);
                }
            }
            std::size_t off = grid_offset(spec, j1, j2);
            table.x[off] = re * scale;
            table.y[off] = im * scale;
        }
    }
    return table;
}

PeriodogramGrid periodogram(const FourierTable& table) {
    PeriodogramGrid pg(table.spec);
    for (std::size_t i = 0; i < pg.i_values.size(); ++i)
        pg.i_values[i] = table.x[i] * table.x[i] + table.y[i] * table.y[i];
    pg.i_values[grid_offset(table.spec, table.spec.d1, table.spec.d2)] = 0.0;  // D ∩ T
    return pg;
}

AutocovTable sample_autocovariance(const FieldGrid& field, MeanMode mode, double mu) {
    const LatticeSpec& spec = field.spec;
    double center = mu;
    if (mode == MeanMode::Estimated) {
        double s = 0.0;
        for (double v : field.values) s += v;
        center = s / static_cast<double>(spec.size());
    }
    std::vector<double> c(field.values.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = field.values[i] - center;

    AutocovTable table(spec);
    const double inv_size = 1.0 / static_cast<double>(spec.size());
    for (int r2 = -(spec.d2 - 1); r2 <= spec.d2 - 1; ++r2) {
        for (int r1 = -(spec.d1 - 1); r1 <= spec.d1 - 1; ++r1) {
            double acc = 0.0;
            const int t1_lo = std::max(1, 1 - r1), t1_hi = std::min(spec.d1, spec.d1 - r1);
            const int t2_lo = std::max(1, 1 - r2), t2_hi = std::min(spec.d2, spec.d2 - r2);
            for (int t2 = t2_lo; t2 <= t2_hi; ++t2) {
                const double* row = c.data() + static_cast<std::size_t>(t2 - 1) * spec.d1;
                const double* row_sh = c.data() + static_cast<std::size_t>(t2 + r2 - 1) * spec.d1 + r1;
                for (int t1 = t1_lo; t1 <= t1_hi; ++t1) acc += row[t1 - 1] * row_sh[t1 - 1];
            }
            table.slot(r1, r2) = acc * inv_size;
        }
    }
    return table;
}

void write_periodogram_csv(const PeriodogramGrid& pg, std::ostream& os) {
    os << "j1,j2,lambda1,lambda2,I\n";
    char buf[160];
    for (int j2 = 1; j2 <= pg.spec.d2; ++j2)
        for (int j1 = 1; j1 <= pg.spec.d1; ++j1) {
            auto [l1, l2] = frequency(pg.spec, j1, j2);
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", j1, j2, l1, l2,
                          pg.at(j1, j2));
            os << buf;
        }
}

}  // namespace latspec

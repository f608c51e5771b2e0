#pragma once

#include <iosfwd>
#include <vector>

#include "latspec/fields.hpp"
#include "latspec/lattice.hpp"

namespace latspec {

/// Fourier coefficients x(j), y(j) for j in T, defined by
/// x(j) + i*y(j) = |T|^{-1/2} sum_t V(t) exp(-i lambda_j . t), t 1-based.
/// Both are |T|-periodic in j, so lookups accept any integer pair.
struct FourierTable {
    LatticeSpec spec;
    std::vector<double> x, y;  // row-major, j1 fastest

    explicit FourierTable(const LatticeSpec& s)
        : spec(s),
          x(static_cast<std::size_t>(s.size()), 0.0),
          y(static_cast<std::size_t>(s.size()), 0.0) {}

    double x_at(long long j1, long long j2) const {
        return x[grid_offset(spec, wrap_index(j1, spec.d1), wrap_index(j2, spec.d2))];
    }
    double y_at(long long j1, long long j2) const {
        return y[grid_offset(spec, wrap_index(j1, spec.d1), wrap_index(j2, spec.d2))];
    }
};

/// FFT-based transform with the phase correction restoring 1-based t.
FourierTable fourier_coefficients(const FieldGrid& field);

/// Direct O(|T|^2) evaluation of the same sums; test oracle.
FourierTable dft_naive_oracle(const FieldGrid& field);

/// Periodogram I(j) = x^2 + y^2 off D, zero on D, extended to all of Z^2 by
/// periodicity (an exact identity, not an approximation).
struct PeriodogramGrid {
    LatticeSpec spec;
    std::vector<double> i_values;  // row-major over T, j1 fastest

    explicit PeriodogramGrid(const LatticeSpec& s)
        : spec(s), i_values(static_cast<std::size_t>(s.size()), 0.0) {}

    double at(long long j1, long long j2) const {
        return i_values[grid_offset(spec, wrap_index(j1, spec.d1), wrap_index(j2, spec.d2))];
    }
};

PeriodogramGrid periodogram(const FourierTable& table);

enum class MeanMode { Known, Estimated };

/// Sample autocovariance over lags |r_k| < d_k, biased normalization (always
/// divided by |T|, never by the overlap count).
struct AutocovTable {
    LatticeSpec spec;
    std::vector<double> r_hat;  // lag r1 in [-(d1-1), d1-1] fastest

    explicit AutocovTable(const LatticeSpec& s)
        : spec(s),
          r_hat(static_cast<std::size_t>(2 * s.d1 - 1) * (2 * s.d2 - 1), 0.0) {}

    double at(int r1, int r2) const {
        if (std::abs(r1) >= spec.d1 || std::abs(r2) >= spec.d2)
            throw std::out_of_range("AutocovTable: lag out of range");
        return r_hat[static_cast<std::size_t>(r2 + spec.d2 - 1) * (2 * spec.d1 - 1) +
                     (r1 + spec.d1 - 1)];
    }
    double& slot(int r1, int r2) {
        return r_hat[static_cast<std::size_t>(r2 + spec.d2 - 1) * (2 * spec.d1 - 1) +
                     (r1 + spec.d1 - 1)];
    }
};

AutocovTable sample_autocovariance(const FieldGrid& field, MeanMode mode, double mu = 0.0);

/// CSV export: j1,j2,lambda1,lambda2,I over T.
void write_periodogram_csv(const PeriodogramGrid& pg, std::ostream& os);

}  // namespace latspec

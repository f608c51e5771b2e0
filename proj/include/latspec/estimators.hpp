#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "latspec/fields.hpp"
#include "latspec/kernels.hpp"
#include "latspec/lattice.hpp"
#include "latspec/spectra.hpp"

namespace latspec {

using SpectrumFn = std::function<double(double, double)>;

/// Kernel spectral density estimate at one frequency: the normalized
/// kernel-weighted average of periodogram ordinates, with periodogram lookups
/// reduced periodically and the normalizer summed over the full (finite)
/// kernel support on the frequency grid.
double kernel_density_estimate(const PeriodogramGrid& pg, const KernelSpec& kernel, double l1,
                               double l2);

/// Lag-window estimate: (1/4pi^2) sum_j R(j) k(j1 h1, j2 h2) cos(j . lambda)
/// over all lags |j_k| < d_k, estimated-mean autocovariance, terms with
/// |k| < 1e-14 dropped. Real by construction (R and k are even).
double lag_window_estimate(const FieldGrid& field, const KernelSpec& kernel, double l1, double l2);

/// Precomputed lag products for repeated lag-window evaluations.
struct LagWindowContext {
    LatticeSpec spec;
    std::vector<double> g;  // R(j)*k(j h), lag r1 in [-(d1-1), d1-1] fastest

    LagWindowContext(const FieldGrid& field, const KernelSpec& kernel);
    double eval(double l1, double l2) const;
};

struct GridSpec {
    enum class Kind { Fourier, Uniform };
    Kind kind = Kind::Fourier;
    int m = 64;  // uniform grid resolution

    static GridSpec fourier() { return {Kind::Fourier, 0}; }
    static GridSpec uniform(int m) { return {Kind::Uniform, m}; }
};

struct SpectralEstimate {
    struct Row {
        double l1, l2, f_hat;
    };
    LatticeSpec spec;
    KernelSpec kernel;
    GridSpec grid;
    std::vector<Row> rows;
};

SpectralEstimate estimate_on_grid(const PeriodogramGrid& pg, const KernelSpec& kernel,
                                  const GridSpec& grid);
SpectralEstimate estimate_on_grid(const FieldGrid& field, const KernelSpec& kernel,
                                  const GridSpec& grid);

/// CSV export: lambda1,lambda2,f_hat[,f_true,abs_err].
void write_estimate_csv(const SpectralEstimate& est, std::ostream& os,
                        const SpectrumFn* truth = nullptr);

/// Least-squares fit of a bivariate polynomial in (t1/d1, t2/d2) up to the
/// given total degree; residuals are the estimated field.
struct DetrendResult {
    FieldGrid v_hat;  // residuals
    FieldGrid trend;  // fitted trend; v_hat + trend == input exactly
    std::optional<double> mse_vs_truth;
};

DetrendResult detrend_least_squares(const FieldGrid& y, int degree);
DetrendResult detrend_least_squares(const FieldGrid& y, int degree, const FieldGrid& truth);

/// Basis size (degree+1)(degree+2)/2 of the bivariate polynomial space.
int detrend_basis_size(int degree);

/// Evaluate the normalized-monomial basis combination sum_k c_k u^p v^q at all
/// lattice sites (basis ordered by total degree, then by the v-exponent).
FieldGrid polynomial_trend(const LatticeSpec& spec, const std::vector<double>& coeffs);

/// The estimated-field comparison statistics: empirical MSE, the sup of the
/// spectral-estimate difference over the Fourier grid, the four N-averaged
/// coefficient/periodogram differences and the four weighted-sup differences.
/// Signed sums are reported as magnitudes.
struct EstimatedFieldReport {
    double mse = 0.0;
    double sup_fhat_diff = 0.0;                   // (a)
    double b1 = 0.0, b2 = 0.0, b3 = 0.0, b4 = 0.0;  // (b)(i)-(iv)
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;  // (c)(i)-(iv)
    double q = 4.5;
};

EstimatedFieldReport estimated_field_report(const FieldGrid& v, const FieldGrid& v_hat,
                                            const KernelSpec& kernel, const WeightTable& weights,
                                            const SpectrumFn& f, double q = 4.5);

/// Periodic smoothing S(j) = sum_s p_s A(j+s) of a |T|-periodic array with a
/// weight table; used by the Thm 3 statistics and the (c) comparisons.
std::vector<double> smooth_periodic(const LatticeSpec& spec, const WeightTable& weights,
                                    const std::vector<double>& a);

}  // namespace latspec

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "latspec/lattice.hpp"

namespace latspec {

enum class KernelFamily { UniformProduct, EpanechnikovProduct, Gaussian };

KernelFamily kernel_family_from_name(std::string_view name);
std::string kernel_family_name(KernelFamily family);

/// Kernel family plus bandwidth pair h_T. All three families factor across
/// axes, which the estimators exploit.
struct KernelSpec {
    KernelFamily family = KernelFamily::EpanechnikovProduct;
    double h1 = 0.0, h2 = 0.0;

    KernelSpec(KernelFamily f, double h1_, double h2_) : family(f), h1(h1_), h2(h2_) {
        if (!(h1 > 0.0) || !(h2 > 0.0))
            throw std::invalid_argument("KernelSpec: bandwidths must be > 0");
    }
};

/// Per-axis kernel factor (the 2-D kernel is the product of two of these).
double kernel_value_1d(KernelFamily family, double u);

/// K(t1, t2), no bandwidth scaling.
double kernel_value(const KernelSpec& kernel, double t1, double t2);

/// Per-axis factor of the inverse Fourier transform k (normalized so k(0)=1).
double inverse_transform_k_1d(KernelFamily family, double u);

/// k(x) = integral K(lambda) exp(i x.lambda) d lambda, in closed form.
double inverse_transform_k(const KernelSpec& kernel, double x1, double x2);

/// Half-width of {u : K1(u) > 0} (Gaussian truncated at 8 sigma; the truncated
/// mass is < 1e-14, below every test tolerance).
double support_limit(KernelFamily family);

/// Wrapped, bandwidth-scaled kernel K_h(lambda): 2*pi-periodic per axis.
double wrapped_kernel(const KernelSpec& kernel, double l1, double l2);

/// Discrete weights p_{s,T} = K(lambda_s / h) / sum_j K(lambda_j / h) on the
/// finite support; normalized and even by construction.
struct WeightTable {
    LatticeSpec spec;
    KernelSpec kernel;
    int s1max = 0, s2max = 0;        // support is [-s1max, s1max] x [-s2max, s2max]
    std::vector<double> axis1, axis2;  // per-axis kernel values, index s + smax
    double denom = 0.0;               // sum of all 2-D kernel values

    WeightTable(const LatticeSpec& sp, const KernelSpec& k) : spec(sp), kernel(k) {}

    double at(int s1, int s2) const {
        if (std::abs(s1) > s1max || std::abs(s2) > s2max) return 0.0;
        return axis1[static_cast<std::size_t>(s1 + s1max)] *
               axis2[static_cast<std::size_t>(s2 + s2max)] / denom;
    }
};

WeightTable build_weights(const LatticeSpec& spec, const KernelSpec& kernel);

/// Numerical probes for the kernel assumptions; diagnostics, not gates.
struct KernelReport {
    double k1_residual = 0.0;       // |Riemann sum of K on the Fourier grid - 1|
    double k2_sup_scaled = 0.0;     // sup_lambda |h| * K_h(lambda)
    double k3_integral = 0.0;       // quadrature of integral |K|
    double k5_lipschitz_ratio = 0.0;  // max |h|^{3/2} |K_h(l_s)-K_h(l_t)| / ||l_s-l_t||
    double k4_outside_mass = 0.0;   // fraction of |k| mass outside [-1,1]^2 (window [-20,20]^2)
};

KernelReport validate_kernel(const KernelSpec& kernel, const LatticeSpec& spec);

}  // namespace latspec

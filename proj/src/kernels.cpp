#include "latspec/kernels.hpp"

#include <cmath>
#include <numbers>

#include "latspec/errors.hpp"

namespace latspec {

namespace {
constexpr double kGaussTrunc = 8.0;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
}  // namespace

KernelFamily kernel_family_from_name(std::string_view name) {
    if (name == "uniform") return KernelFamily::UniformProduct;
    if (name == "epanechnikov") return KernelFamily::EpanechnikovProduct;
    if (name == "gaussian") return KernelFamily::Gaussian;
    throw ConfigError("unknown kernel '" + std::string(name) +
                      "' (expected uniform | epanechnikov | gaussian)");
}

std::string kernel_family_name(KernelFamily family) {
    switch (family) {
        case KernelFamily::UniformProduct: return "uniform";
        case KernelFamily::EpanechnikovProduct: return "epanechnikov";
        case KernelFamily::Gaussian: return "gaussian";
    }
    return "?";
}

double kernel_value_1d(KernelFamily family, double u) {
    switch (family) {
        case KernelFamily::UniformProduct:
            return std::abs(u) <= 1.0 ? 0.5 : 0.0;  // closed support boundary
        case KernelFamily::EpanechnikovProduct:
            return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
        case KernelFamily::Gaussian:
            return kInvSqrt2Pi * std::exp(-0.5 * u * u);
    }
    return 0.0;
}

double kernel_value(const KernelSpec& kernel, double t1, double t2) {
    return kernel_value_1d(kernel.family, t1) * kernel_value_1d(kernel.family, t2);
}

double inverse_transform_k_1d(KernelFamily family, double u) {
    switch (family) {
        case KernelFamily::UniformProduct: {
            if (std::abs(u) < 1e-4) return 1.0 - u * u / 6.0;
            return std::sin(u) / u;
        }
        case KernelFamily::EpanechnikovProduct: {
            if (std::abs(u) < 1e-3) return 1.0 - u * u / 10.0;
            return 3.0 * (std::sin(u) - u * std::cos(u)) / (u * u * u);
        }
        case KernelFamily::Gaussian:
            return std::exp(-0.5 * u * u);
    }
    return 0.0;
}

double inverse_transform_k(const KernelSpec& kernel, double x1, double x2) {
    return inverse_transform_k_1d(kernel.family, x1) * inverse_transform_k_1d(kernel.family, x2);
}

double support_limit(KernelFamily family) {
    return family == KernelFamily::Gaussian ? kGaussTrunc : 1.0;
}

namespace {

// Per-axis wrapped factor: sum_j K1((l + 2*pi*j) / h).
double wrapped_axis(KernelFamily family, double h, double l) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double lim = support_limit(family) * h;
    const long long jlo = static_cast<long long>(std::ceil((-lim - l) / two_pi - 1e-12));
    const long long jhi = static_cast<long long>(std::floor((lim - l) / two_pi + 1e-12));
    double acc = 0.0;
    for (long long j = jlo; j <= jhi; ++j) acc += kernel_value_1d(family, (l + two_pi * j) / h);
    return acc;
}

// Composite Simpson on [a,b].
template <class F>
double simpson(F f, double a, double b, int n) {
    if (n % 2 == 1) ++n;
    const double step = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * step) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * step / 3.0;
}

}  // namespace

double wrapped_kernel(const KernelSpec& kernel, double l1, double l2) {
    return wrapped_axis(kernel.family, kernel.h1, l1) * wrapped_axis(kernel.family, kernel.h2, l2) /
           (kernel.h1 * kernel.h2);
}

WeightTable build_weights(const LatticeSpec& spec, const KernelSpec& kernel) {
    if (kernel.h1 * spec.d1 < 2.0 || kernel.h2 * spec.d2 < 2.0)
        throw std::invalid_argument("build_weights: bandwidth too small for lattice (need h*d >= 2)");
    const double two_pi = 2.0 * std::numbers::pi;
    WeightTable table(spec, kernel);
    const double lim = support_limit(kernel.family);
    table.s1max = static_cast<int>(std::floor(lim * kernel.h1 * spec.d1 / two_pi + 1e-9));
    table.s2max = static_cast<int>(std::floor(lim * kernel.h2 * spec.d2 / two_pi + 1e-9));
    table.axis1.resize(2 * table.s1max + 1);
    table.axis2.resize(2 * table.s2max + 1);
    double sum1 = 0.0, sum2 = 0.0;
    for (int s = -table.s1max; s <= table.s1max; ++s)
        sum1 += table.axis1[static_cast<std::size_t>(s + table.s1max)] =
            kernel_value_1d(kernel.family, two_pi * s / (kernel.h1 * spec.d1));
    for (int s = -table.s2max; s <= table.s2max; ++s)
        sum2 += table.axis2[static_cast<std::size_t>(s + table.s2max)] =
            kernel_value_1d(kernel.family, two_pi * s / (kernel.h2 * spec.d2));
    table.denom = sum1 * sum2;
    return table;
}

KernelReport validate_kernel(const KernelSpec& kernel, const LatticeSpec& spec) {
    const double two_pi = 2.0 * std::numbers::pi;
    KernelReport report;

    // K1: the displayed Riemann sum vs 1.
    {
        double sum1 = 0.0, sum2 = 0.0;
        const double lim = support_limit(kernel.family);
        const int s1 = static_cast<int>(std::floor(lim * kernel.h1 * spec.d1 / two_pi + 1e-9));
        const int s2 = static_cast<int>(std::floor(lim * kernel.h2 * spec.d2 / two_pi + 1e-9));
        for (int s = -s1; s <= s1; ++s)
            sum1 += kernel_value_1d(kernel.family, two_pi * s / (kernel.h1 * spec.d1));
        for (int s = -s2; s <= s2; ++s)
            sum2 += kernel_value_1d(kernel.family, two_pi * s / (kernel.h2 * spec.d2));
        const double riemann = sum1 * two_pi / (kernel.h1 * spec.d1) * sum2 * two_pi /
                               (kernel.h2 * spec.d2);
        report.k1_residual = std::abs(riemann - 1.0);
    }

    // K2: sup over a lambda grid of |h| * K_h.
    {
        double sup = 0.0;
        const int grid = 33;
        for (int a = 0; a <= grid; ++a)
            for (int b = 0; b <= grid; ++b)
                sup = std::max(sup, kernel.h1 * kernel.h2 *
                                        wrapped_kernel(kernel, two_pi * a / grid, two_pi * b / grid));
        report.k2_sup_scaled = sup;
    }

    // K3: quadrature of the absolute integral (product kernels factor).
    {
        const double lim = kernel.family == KernelFamily::Gaussian ? 10.0 : 1.0;
        auto f = [&](double u) { return std::abs(kernel_value_1d(kernel.family, u)); };
        const double per_axis = simpson(f, -lim, lim, 4000);
        report.k3_integral = per_axis * per_axis;
    }

    // K5: max scaled difference quotient over adjacent Fourier frequencies.
    {
        double ratio = 0.0;
        const double scale = std::pow(kernel.h1 * kernel.h2, 1.5);
        for (int j2 = 1; j2 <= spec.d2; ++j2) {
            for (int j1 = 1; j1 <= spec.d1; ++j1) {
                auto [l1, l2] = frequency(spec, j1, j2);
                const double here = wrapped_kernel(kernel, l1, l2);
                const double right = wrapped_kernel(kernel, l1 + two_pi / spec.d1, l2);
                const double up = wrapped_kernel(kernel, l1, l2 + two_pi / spec.d2);
                ratio = std::max(ratio, scale * std::abs(right - here) / (two_pi / spec.d1));
                ratio = std::max(ratio, scale * std::abs(up - here) / (two_pi / spec.d2));
            }
        }
        report.k5_lipschitz_ratio = ratio;
    }

    // K4 probe: |k| mass outside [-1,1]^2 on a fixed window (the uniform
    // kernel's sinc tail is not absolutely integrable, so the window matters).
    {
        auto f = [&](double u) { return std::abs(inverse_transform_k_1d(kernel.family, u)); };
        const double window = simpson(f, -20.0, 20.0, 20000);
        const double core = simpson(f, -1.0, 1.0, 2000);
        const double total = window * window;
        report.k4_outside_mass = total > 0.0 ? 1.0 - core * core / total : 0.0;
    }
    return report;
}

}  // namespace latspec

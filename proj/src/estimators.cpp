#include "latspec/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace latspec {

namespace {

constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

// Per-axis window of Fourier indices j with K1((l - 2*pi*j/d)/h) possibly
// nonzero, plus the kernel values on it.
struct AxisWindow {
    long long jlo = 0;
    std::vector<double> k;
};

AxisWindow axis_window(KernelFamily family, double h, int d, double l) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double lim = support_limit(family) * h;
    AxisWindow win;
    win.jlo = static_cast<long long>(std::ceil((l - lim) * d / two_pi - 1e-12));
    const long long jhi = static_cast<long long>(std::floor((l + lim) * d / two_pi + 1e-12));
    win.k.reserve(static_cast<std::size_t>(std::max<long long>(0, jhi - win.jlo + 1)));
    for (long long j = win.jlo; j <= jhi; ++j)
        win.k.push_back(kernel_value_1d(family, (l - two_pi * j / d) / h));
    return win;
}

double axis_denominator(KernelFamily family, double h, int d) {
    const double two_pi = 2.0 * std::numbers::pi;
    const int smax = static_cast<int>(std::floor(support_limit(family) * h * d / two_pi + 1e-9));
    double sum = 0.0;
    for (int s = -smax; s <= smax; ++s) sum += kernel_value_1d(family, two_pi * s / (h * d));
    return sum;
}

void check_bandwidth(const KernelSpec& kernel, const LatticeSpec& spec) {
    if (kernel.h1 * spec.d1 < 2.0 || kernel.h2 * spec.d2 < 2.0)
        throw std::invalid_argument(
            "kernel estimator: bandwidth too small for lattice (need h*d >= 2)");
}

}  // namespace

double kernel_density_estimate(const PeriodogramGrid& pg, const KernelSpec& kernel, double l1,
                               double l2) {
    const LatticeSpec& spec = pg.spec;
    check_bandwidth(kernel, spec);
    const AxisWindow w1 = axis_window(kernel.family, kernel.h1, spec.d1, l1);
    const AxisWindow w2 = axis_window(kernel.family, kernel.h2, spec.d2, l2);
    const double den = axis_denominator(kernel.family, kernel.h1, spec.d1) *
                       axis_denominator(kernel.family, kernel.h2, spec.d2);
    double num = 0.0;
    for (std::size_t b = 0; b < w2.k.size(); ++b) {
        const long long j2 = w2.jlo + static_cast<long long>(b);
        double inner = 0.0;
        for (std::size_t a = 0; a < w1.k.size(); ++a)
            inner += w1.k[a] * pg.at(w1.jlo + static_cast<long long>(a), j2);
        num += w2.k[b] * inner;
    }
    return num / den / kFourPiSq;
}

LagWindowContext::LagWindowContext(const FieldGrid& field, const KernelSpec& kernel)
    : spec(field.spec) {
    check_bandwidth(kernel, spec);
    AutocovTable acov = sample_autocovariance(field, MeanMode::Estimated);
    const int d1 = spec.d1, d2 = spec.d2;
    g.assign(static_cast<std::size_t>(2 * d1 - 1) * (2 * d2 - 1), 0.0);
    for (int r2 = -(d2 - 1); r2 <= d2 - 1; ++r2) {
        const double k2 = inverse_transform_k_1d(kernel.family, r2 * kernel.h2);
        for (int r1 = -(d1 - 1); r1 <= d1 - 1; ++r1) {
            const double kw = inverse_transform_k_1d(kernel.family, r1 * kernel.h1) * k2;
            if (std::abs(kw) < 1e-14) continue;
            g[static_cast<std::size_t>(r2 + d2 - 1) * (2 * d1 - 1) + (r1 + d1 - 1)] =
                acov.at(r1, r2) * kw;
        }
    }
}

double LagWindowContext::eval(double l1, double l2) const {
    const int d1 = spec.d1, d2 = spec.d2;
    // cos(r1*l1 + r2*l2) via per-axis tables; sum over the full symmetric lag
    // range (imaginary parts cancel exactly by evenness).
    std::vector<double> c1(d1), s1(d1), c2(d2), s2(d2);
    for (int r = 0; r < d1; ++r) {
        c1[r] = std::cos(r * l1);
        s1[r] = std::sin(r * l1);
    }
    for (int r = 0; r < d2; ++r) {
        c2[r] = std::cos(r * l2);
        s2[r] = std::sin(r * l2);
    }
    auto gval = [&](int r1, int r2) {
        return g[static_cast<std::size_t>(r2 + d2 - 1) * (2 * d1 - 1) + (r1 + d1 - 1)];
    };
    double acc = gval(0, 0);
    for (int r1 = 1; r1 <= d1 - 1; ++r1) acc += 2.0 * gval(r1, 0) * c1[r1];
    for (int r2 = 1; r2 <= d2 - 1; ++r2) {
        double even = 0.0, odd = 0.0;  // cos(r1 l1 + r2 l2) + cos(-r1 l1 + r2 l2) terms
        even += gval(0, r2);
        for (int r1 = 1; r1 <= d1 - 1; ++r1) {
            const double gp = gval(r1, r2), gm = gval(-r1, r2);
            even += (gp + gm) * c1[r1];
            odd += (gm - gp) * s1[r1];
        }
        acc += 2.0 * (even * c2[r2] + odd * s2[r2]);
    }
    return acc / kFourPiSq;
}

double lag_window_estimate(const FieldGrid& field, const KernelSpec& kernel, double l1, double l2) {
    return LagWindowContext(field, kernel).eval(l1, l2);
}

namespace {

std::vector<std::pair<double, double>> grid_points(const LatticeSpec& spec, const GridSpec& grid) {
    std::vector<std::pair<double, double>> pts;
    if (grid.kind == GridSpec::Kind::Fourier) {
        pts.reserve(static_cast<std::size_t>(spec.size()));
        for (int j2 = 1; j2 <= spec.d2; ++j2)
            for (int j1 = 1; j1 <= spec.d1; ++j1) pts.push_back(frequency(spec, j1, j2));
    } else {
        if (grid.m < 1) throw std::invalid_argument("uniform grid resolution must be >= 1");
        const double step = 2.0 * std::numbers::pi / grid.m;
        pts.reserve(static_cast<std::size_t>(grid.m) * grid.m);
        for (int b = 0; b < grid.m; ++b)
            for (int a = 0; a < grid.m; ++a) pts.push_back({a * step, b * step});
    }
    return pts;
}

}  // namespace

SpectralEstimate estimate_on_grid(const PeriodogramGrid& pg, const KernelSpec& kernel,
                                  const GridSpec& grid) {
    const LatticeSpec& spec = pg.spec;
    check_bandwidth(kernel, spec);
    SpectralEstimate est{spec, kernel, grid, {}};
    const double den = axis_denominator(kernel.family, kernel.h1, spec.d1) *
                       axis_denominator(kernel.family, kernel.h2, spec.d2);

    // Row-wise evaluation: collapse axis 2 once per distinct l2, then sweep l1.
    std::vector<double> l1s, l2s;
    if (grid.kind == GridSpec::Kind::Fourier) {
        for (int j = 1; j <= spec.d1; ++j) l1s.push_back(frequency(spec, j, 1).first);
        for (int j = 1; j <= spec.d2; ++j) l2s.push_back(frequency(spec, 1, j).second);
    } else {
        for (int a = 0; a < grid.m; ++a) l1s.push_back(2.0 * std::numbers::pi * a / grid.m);
        l2s = l1s;
    }
    std::vector<double> collapsed(static_cast<std::size_t>(spec.d1));
    est.rows.reserve(l1s.size() * l2s.size());
    for (double l2 : l2s) {
        const AxisWindow w2 = axis_window(kernel.family, kernel.h2, spec.d2, l2);
        std::fill(collapsed.begin(), collapsed.end(), 0.0);
        // wrapped lookups reuse the stored period, so the D-zero rule carries over
        for (std::size_t b = 0; b < w2.k.size(); ++b) {
            const int j2 = wrap_index(w2.jlo + static_cast<long long>(b), spec.d2);
            const double* row = pg.i_values.data() + static_cast<std::size_t>(j2 - 1) * spec.d1;
            for (int j1 = 1; j1 <= spec.d1; ++j1)
                collapsed[static_cast<std::size_t>(j1 - 1)] += w2.k[b] * row[j1 - 1];
        }
        for (double l1 : l1s) {
            const AxisWindow w1 = axis_window(kernel.family, kernel.h1, spec.d1, l1);
            double num = 0.0;
            for (std::size_t a = 0; a < w1.k.size(); ++a) {
                const int j1 = wrap_index(w1.jlo + static_cast<long long>(a), spec.d1);
                num += w1.k[a] * collapsed[static_cast<std::size_t>(j1 - 1)];
            }
            est.rows.push_back({l1, l2, num / den / kFourPiSq});
        }
    }
    return est;
}

SpectralEstimate estimate_on_grid(const FieldGrid& field, const KernelSpec& kernel,
                                  const GridSpec& grid) {
    SpectralEstimate est{field.spec, kernel, grid, {}};
    LagWindowContext ctx(field, kernel);
    for (auto [l1, l2] : grid_points(field.spec, grid)) est.rows.push_back({l1, l2, ctx.eval(l1, l2)});
    return est;
}

void write_estimate_csv(const SpectralEstimate& est, std::ostream& os, const SpectrumFn* truth) {
    os << (truth ? "lambda1,lambda2,f_hat,f_true,abs_err\n" : "lambda1,lambda2,f_hat\n");
    char buf[240];
    for (const auto& r : est.rows) {
        if (truth) {
            const double ft = (*truth)(r.l1, r.l2);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.l1, r.l2, r.f_hat,
                          ft, std::abs(r.f_hat - ft));
        } else {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.l1, r.l2, r.f_hat);
        }
        os << buf;
    }
}

int detrend_basis_size(int degree) { return (degree + 1) * (degree + 2) / 2; }

namespace {

// Normalized-monomial basis columns u^p v^q ordered by total degree, then by
// the v-exponent.
std::vector<std::vector<double>> basis_columns(const LatticeSpec& spec, int degree) {
    std::vector<std::vector<double>> cols;
    for (int deg = 0; deg <= degree; ++deg) {
        for (int qv = 0; qv <= deg; ++qv) {
            const int pu = deg - qv;
            std::vector<double> col(static_cast<std::size_t>(spec.size()));
            for (int t2 = 1; t2 <= spec.d2; ++t2) {
                const double v = static_cast<double>(t2) / spec.d2;
                for (int t1 = 1; t1 <= spec.d1; ++t1) {
                    const double u = static_cast<double>(t1) / spec.d1;
                    col[grid_offset(spec, t1, t2)] = std::pow(u, pu) * std::pow(v, qv);
                }
            }
            cols.push_back(std::move(col));
        }
    }
    return cols;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace

DetrendResult detrend_least_squares(const FieldGrid& y, int degree) {
    if (degree < 0) throw std::invalid_argument("detrend: degree must be >= 0");
    const LatticeSpec& spec = y.spec;
    const int m = detrend_basis_size(degree);
    if (m > spec.size() / 4)
        throw std::invalid_argument("detrend: basis too large for lattice (need size <= |T|/4)");

    // Modified Gram-Schmidt with reorthogonalization; the fit is the projection
    // onto the orthonormalized span, so residual orthogonality holds to
    // rounding rather than to the normal-equation condition number.
    auto cols = basis_columns(spec, degree);
    std::vector<std::vector<double>> qcols;
    for (auto& col : cols) {
        const double orig = std::sqrt(dot(col, col));
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& qc : qcols) {
                const double proj = dot(qc, col);
                for (std::size_t i = 0; i < col.size(); ++i) col[i] -= proj * qc[i];
            }
        const double nrm = std::sqrt(dot(col, col));
        if (!(nrm > 1e-10 * orig))
            throw std::runtime_error("detrend: rank-deficient design (degenerate lattice)");
        for (double& v : col) v /= nrm;
        qcols.push_back(std::move(col));
    }

    DetrendResult res{FieldGrid(spec), FieldGrid(spec), std::nullopt};
    std::vector<double> fit(static_cast<std::size_t>(spec.size()), 0.0);
    for (const auto& qc : qcols) {
        const double proj = dot(qc, y.values);
        for (std::size_t i = 0; i < fit.size(); ++i) fit[i] += proj * qc[i];
    }
    for (std::size_t i = 0; i < fit.size(); ++i) {
        res.trend.values[i] = fit[i];
        res.v_hat.values[i] = y.values[i] - fit[i];
    }
    return res;
}

DetrendResult detrend_least_squares(const FieldGrid& y, int degree, const FieldGrid& truth) {
    DetrendResult res = detrend_least_squares(y, degree);
    if (truth.spec != y.spec) throw std::invalid_argument("detrend: truth lattice mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.values.size(); ++i) {
        const double d = truth.values[i] - res.v_hat.values[i];
        acc += d * d;
    }
    res.mse_vs_truth = acc / static_cast<double>(y.spec.size());
    return res;
}

FieldGrid polynomial_trend(const LatticeSpec& spec, const std::vector<double>& coeffs) {
    int degree = 0;
    while (detrend_basis_size(degree) < static_cast<int>(coeffs.size())) ++degree;
    if (detrend_basis_size(degree) != static_cast<int>(coeffs.size()))
        throw std::invalid_argument("polynomial_trend: coefficient count must be a triangular number");
    auto cols = basis_columns(spec, degree);
    FieldGrid trend(spec);
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        for (std::size_t i = 0; i < trend.values.size(); ++i)
            trend.values[i] += coeffs[k] * cols[k][i];
    return trend;
}

std::vector<double> smooth_periodic(const LatticeSpec& spec, const WeightTable& weights,
                                    const std::vector<double>& a) {
    const int d1 = spec.d1, d2 = spec.d2;
    // axis 1 pass
    std::vector<double> mid(a.size(), 0.0), out(a.size(), 0.0);
    for (int j2 = 0; j2 < d2; ++j2) {
        const double* row = a.data() + static_cast<std::size_t>(j2) * d1;
        double* orow = mid.data() + static_cast<std::size_t>(j2) * d1;
        for (int j1 = 0; j1 < d1; ++j1) {
            double acc = 0.0;
            for (int s = -weights.s1max; s <= weights.s1max; ++s) {
                int idx = (j1 + s) % d1;
                if (idx < 0) idx += d1;
                acc += weights.axis1[static_cast<std::size_t>(s + weights.s1max)] * row[idx];
            }
            orow[j1] = acc;
        }
    }
    // axis 2 pass with normalization
    for (int j2 = 0; j2 < d2; ++j2) {
        double* orow = out.data() + static_cast<std::size_t>(j2) * d1;
        for (int s = -weights.s2max; s <= weights.s2max; ++s) {
            int idx = (j2 + s) % d2;
            if (idx < 0) idx += d2;
            const double w = weights.axis2[static_cast<std::size_t>(s + weights.s2max)];
            const double* mrow = mid.data() + static_cast<std::size_t>(idx) * d1;
            for (int j1 = 0; j1 < d1; ++j1) orow[j1] += w * mrow[j1];
        }
        for (int j1 = 0; j1 < d1; ++j1) orow[j1] /= weights.denom;
    }
    return out;
}

EstimatedFieldReport estimated_field_report(const FieldGrid& v, const FieldGrid& v_hat,
                                            const KernelSpec& kernel, const WeightTable& weights,
                                            const SpectrumFn& f, double q) {
    if (v.spec != v_hat.spec) throw std::invalid_argument("estimated_field_report: lattice mismatch");
    const LatticeSpec& spec = v.spec;
    EstimatedFieldReport rep;
    rep.q = q;

    double acc = 0.0;
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        const double d = v.values[i] - v_hat.values[i];
        acc += d * d;
    }
    rep.mse = acc / static_cast<double>(spec.size());

    const FourierTable tv = fourier_coefficients(v);
    const FourierTable th = fourier_coefficients(v_hat);
    const PeriodogramGrid pv = periodogram(tv);
    const PeriodogramGrid ph = periodogram(th);

    // (a): Eq. 4 estimates on the Fourier grid for both fields.
    {
        const SpectralEstimate ev = estimate_on_grid(pv, kernel, GridSpec::fourier());
        const SpectralEstimate eh = estimate_on_grid(ph, kernel, GridSpec::fourier());
        double sup = 0.0;
        for (std::size_t i = 0; i < ev.rows.size(); ++i)
            sup = std::max(sup, std::abs(ev.rows[i].f_hat - eh.rows[i].f_hat));
        rep.sup_fhat_diff = sup;
    }

    const Partition part = build_partition(spec);
    const double n_count = static_cast<double>(part.n_set.size());

    double b1 = 0.0, b2 = 0.0, b3 = 0.0, b4 = 0.0;
    for (FreqIndex j : part.n_set) {
        auto [l1, l2] = frequency(spec, j.j1, j.j2);
        const double fj = f(l1, l2);
        const std::size_t off = grid_offset(spec, j.j1, j.j2);
        b1 += (tv.x[off] - th.x[off] + tv.y[off] - th.y[off]) / std::sqrt(fj);
        const double iv = pv.i_values[off], ih = ph.i_values[off];
        b2 += (iv - ih) / fj;
        b3 += (iv * iv - ih * ih) / (fj * fj);
        b4 += (std::pow(iv, q) - std::pow(ih, q)) / std::pow(fj, q);
    }
    rep.b1 = std::abs(b1) / n_count;
    rep.b2 = std::abs(b2) / n_count;
    rep.b3 = std::abs(b3) / n_count;
    rep.b4 = std::abs(b4) / n_count;

    // (c): weighted means with the p_{s,T} table; sup of magnitudes over N.
    {
        const std::size_t n = v.values.size();
        std::vector<double> dxy(n), di(n), di2(n), diq(n);
        for (std::size_t i = 0; i < n; ++i) {
            dxy[i] = tv.x[i] - th.x[i] + tv.y[i] - th.y[i];
            di[i] = pv.i_values[i] - ph.i_values[i];
            di2[i] = pv.i_values[i] * pv.i_values[i] - ph.i_values[i] * ph.i_values[i];
            diq[i] = std::pow(pv.i_values[i], q) - std::pow(ph.i_values[i], q);
        }
        const auto s1 = smooth_periodic(spec, weights, dxy);
        const auto s2 = smooth_periodic(spec, weights, di);
        const auto s3 = smooth_periodic(spec, weights, di2);
        const auto s4 = smooth_periodic(spec, weights, diq);
        for (FreqIndex j : part.n_set) {
            const std::size_t off = grid_offset(spec, j.j1, j.j2);
            rep.c1 = std::max(rep.c1, std::abs(s1[off]));
            rep.c2 = std::max(rep.c2, std::abs(s2[off]));
            rep.c3 = std::max(rep.c3, std::abs(s3[off]));
            rep.c4 = std::max(rep.c4, std::abs(s4[off]));
        }
    }
    return rep;
}

}  // namespace latspec

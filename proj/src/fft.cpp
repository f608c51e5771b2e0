#include "latspec/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace latspec {

namespace {

int smallest_factor(int n) {
    for (int p = 2; p * p <= n; ++p)
        if (n % p == 0) return p;
    return n;
}

// Twiddle table w[j] = exp(-2*pi*i*j/n), j = 0..n-1.
std::vector<std::complex<double>> twiddles(int n) {
    std::vector<std::complex<double>> w(n);
    for (int j = 0; j < n; ++j) {
        double a = -2.0 * std::numbers::pi * j / n;
        w[j] = {std::cos(a), std::sin(a)};
    }
    return w;
}

// out[k] = sum_t in[t*stride_in] w_n^{t*k}, recursing on the smallest prime factor.
void fft_rec(const std::complex<double>* in, std::complex<double>* out, int n, int stride_in,
             const std::vector<std::complex<double>>& w, int wstep) {
    const int p = smallest_factor(n);
    const long long wn = static_cast<long long>(w.size());
    if (p == n) {  // prime length: direct sum
        for (int k = 0; k < n; ++k) {
            std::complex<double> acc = in[0];
            for (int t = 1; t < n; ++t) {
                long long e = (static_cast<long long>(t) * k * wstep) % wn;
                acc += in[static_cast<std::size_t>(t) * stride_in] * w[static_cast<std::size_t>(e)];
            }
            out[k] = acc;
        }
        return;
    }
    const int m = n / p;
    std::vector<std::complex<double>> sub(static_cast<std::size_t>(n));
    for (int r = 0; r < p; ++r)
        fft_rec(in + static_cast<std::size_t>(r) * stride_in, sub.data() + static_cast<std::size_t>(r) * m,
                m, stride_in * p, w, wstep * p);
    // combine: out[k] = sum_r w_n^{r*k} * sub_r[k mod m]
    for (int k = 0; k < n; ++k) {
        std::complex<double> acc = sub[static_cast<std::size_t>(k % m)];
        for (int r = 1; r < p; ++r) {
            long long e = (static_cast<long long>(r) * k * wstep) % wn;
            acc += w[static_cast<std::size_t>(e)] * sub[static_cast<std::size_t>(r) * m + k % m];
        }
        out[k] = acc;
    }
}

}  // namespace

void fft_1d(const std::complex<double>* in, std::complex<double>* out, int n, int stride_in) {
    if (n <= 0) throw std::invalid_argument("fft_1d: n must be positive");
    if (n == 1) { out[0] = in[0]; return; }
    auto w = twiddles(n);
    fft_rec(in, out, n, stride_in, w, 1);
}

std::vector<std::complex<double>> fft_2d(const std::vector<std::complex<double>>& in,
                                         int d1, int d2) {
    if (static_cast<long long>(in.size()) != static_cast<long long>(d1) * d2)
        throw std::invalid_argument("fft_2d: size mismatch");
    std::vector<std::complex<double>> stage(in.size()), out(in.size());
    // axis 1 (contiguous rows of length d1)
    for (int t2 = 0; t2 < d2; ++t2)
        fft_1d(in.data() + static_cast<std::size_t>(t2) * d1,
               stage.data() + static_cast<std::size_t>(t2) * d1, d1, 1);
    // axis 2 (stride d1 columns)
    std::vector<std::complex<double>> col(static_cast<std::size_t>(d2));
    for (int k1 = 0; k1 < d1; ++k1) {
        fft_1d(stage.data() + k1, col.data(), d2, d1);
        for (int k2 = 0; k2 < d2; ++k2)
            out[static_cast<std::size_t>(k2) * d1 + k1] = col[static_cast<std::size_t>(k2)];
    }
    return out;
}

}  // namespace latspec

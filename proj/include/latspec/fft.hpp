#pragma once

#include <complex>
#include <vector>

namespace latspec {

/// Forward DFT of length n: out[k] = sum_t in[t] exp(-2*pi*i*t*k/n).
/// Mixed-radix Cooley-Tukey; prime lengths fall back to the direct sum,
/// so arbitrary n (7, 12, 48, ...) is supported.
void fft_1d(const std::complex<double>* in, std::complex<double>* out, int n, int stride_in);

/// Forward 2-D DFT of an array stored t1-fastest:
/// out[k2*d1+k1] = sum_{t1,t2} in[t2*d1+t1] exp(-2*pi*i*(t1*k1/d1 + t2*k2/d2)).
std::vector<std::complex<double>> fft_2d(const std::vector<std::complex<double>>& in,
                                         int d1, int d2);

}  // namespace latspec

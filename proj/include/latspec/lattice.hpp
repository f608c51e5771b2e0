#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace latspec {

/// Rectangular lattice T = {1..d1} x {1..d2}. Degenerate extents (d < 2) are
/// rejected at construction; the frequency partition below presupposes d >= 2.
struct LatticeSpec {
    int d1 = 0;
    int d2 = 0;

    LatticeSpec(int d1_, int d2_) : d1(d1_), d2(d2_) {
        if (d1 < 2 || d2 < 2)
            throw std::invalid_argument("LatticeSpec: lattice extents must be >= 2");
    }

    long long size() const { return static_cast<long long>(d1) * d2; }

    bool operator==(const LatticeSpec&) const = default;
};

/// 1-based frequency index j = (j1, j2), j_k in {1..d_k}. The associated
/// frequency is lambda_j = (2*pi*j1/d1, 2*pi*j2/d2).
struct FreqIndex {
    int j1 = 0;
    int j2 = 0;
    bool operator==(const FreqIndex&) const = default;
};

enum class ParityCase { OddOdd, OddEven, EvenOdd, EvenEven };

/// Partition T = N ∪ Ñ ∪ M. N carries the covariance information, Ñ is its
/// mirror under the reflection symmetry of the Fourier coefficients, M carries
/// the mean. Sets are materialized as ordered lists (row-major, j1 fastest,
/// within each defining block; Ñ in the reflect-image order of N) so weighted
/// sums over N are reproducible.
struct Partition {
    std::vector<FreqIndex> n_set;
    std::vector<FreqIndex> n_tilde_set;
    std::vector<FreqIndex> m_set;
    ParityCase parity_case = ParityCase::OddOdd;
};

/// Mirror index: component-wise d - j, with j_k = d_k a fixed point.
FreqIndex reflect_index(const LatticeSpec& spec, FreqIndex j);

Partition build_partition(const LatticeSpec& spec);

/// lambda_j = (2*pi*j1/d1, 2*pi*j2/d2) for any integer pair (not restricted to T).
std::pair<double, double> frequency(const LatticeSpec& spec, long long j1, long long j2);

/// D = {(c1*d1, c2*d2)}: indices whose frequency is a multiple of 2*pi per axis.
bool in_D(const LatticeSpec& spec, long long j1, long long j2);

/// Row-major (j1 fastest) storage offset for a 1-based index in T.
inline std::size_t grid_offset(const LatticeSpec& spec, int j1, int j2) {
    return static_cast<std::size_t>(j2 - 1) * spec.d1 + (j1 - 1);
}

/// Reduce an arbitrary integer index into T by periodicity (j=d maps to itself,
/// multiples of d map to d, not 0).
inline int wrap_index(long long j, int d) {
    long long r = j % d;
    if (r <= 0) r += d;
    return static_cast<int>(r);
}

}  // namespace latspec

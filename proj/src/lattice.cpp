#include "latspec/lattice.hpp"

#include <cmath>
#include <numbers>

namespace latspec {

FreqIndex reflect_index(const LatticeSpec& spec, FreqIndex j) {
    auto mirror = [](int s, int d) { return s < d ? d - s : d; };
    return {mirror(j.j1, spec.d1), mirror(j.j2, spec.d2)};
}

Partition build_partition(const LatticeSpec& spec) {
    const int d1 = spec.d1, d2 = spec.d2;
    const bool odd1 = d1 % 2 == 1, odd2 = d2 % 2 == 1;

    Partition part;
    auto push_block = [&](int t1_lo, int t1_hi, int t2_lo, int t2_hi) {
        for (int t2 = t2_lo; t2 <= t2_hi; ++t2)
            for (int t1 = t1_lo; t1 <= t1_hi; ++t1)
                part.n_set.push_back({t1, t2});
    };

    if (odd1 && odd2) {
        part.parity_case = ParityCase::OddOdd;
        push_block(1, d1, 1, (d2 - 1) / 2);
        push_block(1, (d1 - 1) / 2, d2, d2);
        part.m_set = {{d1, d2}};
    } else if (odd1 && !odd2) {
        part.parity_case = ParityCase::OddEven;
        push_block(1, d1, 1, d2 / 2 - 1);
        push_block(1, (d1 - 1) / 2, d2 / 2, d2 / 2);
        push_block(1, (d1 - 1) / 2, d2, d2);
        part.m_set = {{d1, d2}, {d1, d2 / 2}};
    } else if (!odd1 && odd2) {
        // transposed form of the odd/even case
        part.parity_case = ParityCase::EvenOdd;
        for (int t1 = 1; t1 <= d1 / 2 - 1; ++t1)
            for (int t2 = 1; t2 <= d2; ++t2)
                part.n_set.push_back({t1, t2});
        for (int t1 : {d1 / 2, d1})
            for (int t2 = 1; t2 <= (d2 - 1) / 2; ++t2)
                part.n_set.push_back({t1, t2});
        part.m_set = {{d1, d2}, {d1 / 2, d2}};
    } else {
        part.parity_case = ParityCase::EvenEven;
        push_block(1, d1, 1, d2 / 2 - 1);
        push_block(1, d1 / 2 - 1, d2 / 2, d2 / 2);
        push_block(1, d1 / 2 - 1, d2, d2);
        part.m_set = {{d1, d2}, {d1 / 2, d2}, {d1, d2 / 2}, {d1 / 2, d2 / 2}};
    }

    part.n_tilde_set.reserve(part.n_set.size());
    for (FreqIndex j : part.n_set) part.n_tilde_set.push_back(reflect_index(spec, j));
    return part;
}

std::pair<double, double> frequency(const LatticeSpec& spec, long long j1, long long j2) {
    const double two_pi = 2.0 * std::numbers::pi;
    return {two_pi * static_cast<double>(j1) / spec.d1,
            two_pi * static_cast<double>(j2) / spec.d2};
}

bool in_D(const LatticeSpec& spec, long long j1, long long j2) {
    return j1 % spec.d1 == 0 && j2 % spec.d2 == 0;
}

}  // namespace latspec

#pragma once

#include <cstdint>

namespace latspec {

// Counter-based generator: every draw is a pure hash of
// (seed, stream, site, counter), so individual innovations are addressable
// and can be swapped without replaying a sequential stream.

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t counter_hash(uint64_t seed, uint64_t stream, int64_t i1, int64_t i2,
                             uint64_t counter) {
    uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (0xa0761d6478bd642fULL + stream));
    h = splitmix64(h ^ static_cast<uint64_t>(i1));
    h = splitmix64(h ^ (static_cast<uint64_t>(i2) * 0xe7037ed1a0b428dbULL));
    h = splitmix64(h ^ counter);
    return h;
}

/// Uniform in the open interval (0,1); never returns an exact endpoint.
inline double u01(uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Derived seed for replication r of a seeded experiment.
inline uint64_t split_seed(uint64_t seed, uint64_t r) {
    return splitmix64(seed ^ splitmix64(0x6c62272e07bb0142ULL + r));
}

/// Per-site stream of uniforms indexed by a counter.
struct SiteStream {
    uint64_t seed;
    uint64_t stream;
    int64_t i1, i2;
    uint64_t counter = 0;

    double next_u01() { return u01(counter_hash(seed, stream, i1, i2, counter++)); }
};

}  // namespace latspec

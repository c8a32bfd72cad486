#pragma once

#include <cstdint>

namespace toriclab {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so ensemble members can be sampled in any order
// or in parallel and still reproduce bit-exactly on any platform.
// The mixer is the SplitMix64 finalizer, chained once per key component.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t prf(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ (0xA0761D6478BD642FULL * (stream + 1)));
    h = mix64(h ^ (0xE7037ED1A0B428DBULL * (counter + 1)));
    return h;
}

// Uniform double in [0,1) with 53 random bits.
inline double prf_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(prf(seed, stream, counter) >> 11) * 0x1.0p-53;
}

// Sequential stream view over the PRF, for Markov chains. State is just the
// counter, so a chain is reproducible from (seed, stream) alone.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream), counter_(0) {}

    std::uint64_t next_u64() { return prf(seed_, stream_, counter_++); }
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    // Uniform integer in [0, n) by rejection-free multiply-shift (n << 2^64).
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t seed_, stream_, counter_;
};

} // namespace toriclab

#pragma once

// Deterministic splittable random source. Each trial draws from its own
// substream keyed by (seed, stream index), so parallel and serial batch
// execution aggregate identically across platforms.

#include <cstdint>

namespace aware {

class Rng {
public:
    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        Rng r;
        r.state_ = mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull));
        if (r.state_ == 0) r.state_ = 0x4d595df4d0f33173ull;
        return r;
    }

    std::uint64_t next() {
        // splitmix64 step
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, n), n >= 1. Multiply-shift; bias is below
    // 2^-32 for the small ranges used here and identical everywhere.
    std::uint32_t below(std::uint32_t n) {
        return static_cast<std::uint32_t>((static_cast<unsigned __int128>(next() >> 16) * n) >> 48);
    }

    int between(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(below(static_cast<std::uint32_t>(hi - lo + 1)));
    }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
        z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
        return z ^ (z >> 33);
    }
    std::uint64_t state_ = 0x853c49e6748fea9bull;
};

} // namespace aware

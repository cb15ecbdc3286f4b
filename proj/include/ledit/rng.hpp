#pragma once

#include <cmath>
#include <cstdint>

namespace ledit {

// splitmix64 finalizer; used for seeding and for hashing seed tuples.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c = 0) {
    uint64_t s = a;
    uint64_t h = splitmix64(s);
    s ^= b + 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= c + 0xc2b2ae3d27d4eb4fULL;
    h ^= splitmix64(s);
    return h;
}

// PCG32 (O'Neill). Self-contained so that draws are identical across
// platforms and standard-library versions.
class Rng {
public:
    explicit Rng(uint64_t seed = 0) {
        state_ = 0;
        inc_ = (seed << 1u) | 1u;
        next_u32();
        state_ += 0x853c49e6748fea9bULL + seed;
        next_u32();
    }

    uint32_t next_u32() {
        uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
        uint32_t rot = static_cast<uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // Uniform integer in [0, bound). bound must be > 0.
    uint32_t uniform_int(uint32_t bound) {
        // Lemire's method without the rejection loop would bias; keep the loop.
        uint64_t m = static_cast<uint64_t>(next_u32()) * bound;
        uint32_t lo = static_cast<uint32_t>(m);
        if (lo < bound) {
            uint32_t t = (0u - bound) % bound;
            while (lo < t) {
                m = static_cast<uint64_t>(next_u32()) * bound;
                lo = static_cast<uint32_t>(m);
            }
        }
        return static_cast<uint32_t>(m >> 32);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        uint64_t hi = next_u32();
        uint64_t lo = next_u32();
        uint64_t bits = ((hi << 32) | lo) >> 11;
        return static_cast<double>(bits) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

private:
    uint64_t state_ = 0;
    uint64_t inc_ = 1;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// Counter-based substream: a fresh generator keyed by (seed, stream, index).
// Stateless derivation is what makes training resumable and replayable.
inline Rng substream(uint64_t seed, uint64_t stream, uint64_t index = 0) {
    return Rng(mix_seed(seed, stream, index));
}

} // namespace ledit

#pragma once

#include <cstdint>

namespace fkfpe {

/// splitmix64: seeds independent per-particle streams from (seed, index).
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Small counter-based generator: xoshiro256** seeded via splitmix64.
/// Deterministic across platforms, cheap to construct per particle.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }
    Rng(uint64_t seed, uint64_t stream) : Rng(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1))) {}

    uint64_t next_u64() {
        auto rotl = [](uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        uint64_t result = rotl(s_[1] * 5, 7) * 9;
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on (0, 1]: never returns 0, safe for log().
    double uniform() {
        return double((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

private:
    uint64_t s_[4];
};

}  // namespace fkfpe

#pragma once

#include <cmath>
#include <cstdint>

#include "odt/constants.hpp"

namespace odt {

// splitmix64: used only to expand (seed, stream) pairs into xoshiro state.
inline std::uint64_t splitmix64_next(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman & Vigna). Deterministic across platforms; one
// independent instance per work shard keeps parallel runs reproducible.
class Xoshiro256 {
  public:
    Xoshiro256(std::uint64_t seed, std::uint64_t stream) {
        // Mix the stream index in before expansion so consecutive streams
        // do not share correlated splitmix sequences.
        std::uint64_t s = seed ^ (0x6a09e667f3bcc909ULL * (stream + 1));
        for (auto& word : state_) word = splitmix64_next(s);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Three standard normals via Box-Muller. Always consumes exactly four
    // uniforms (the fourth normal is discarded) so the draw count per call is
    // fixed regardless of values — required for shard reproducibility.
    void normal3(double out[3]) {
        double u1 = uniform();
        double u2 = uniform();
        double u3 = uniform();
        double u4 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        if (u3 <= 0.0) u3 = 0x1.0p-53;
        const double r1 = std::sqrt(-2.0 * std::log(u1));
        const double r2 = std::sqrt(-2.0 * std::log(u3));
        out[0] = r1 * std::cos(2.0 * constants::pi * u2);
        out[1] = r1 * std::sin(2.0 * constants::pi * u2);
        out[2] = r2 * std::cos(2.0 * constants::pi * u4);  // sin partner discarded
    }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::uint64_t state_[4] = {};
};

}  // namespace odt

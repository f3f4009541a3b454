#pragma once

#include <cstdint>

namespace cowu {

/// SplitMix64 generator, used for seed expansion and stream derivation.
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() noexcept {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// xoshiro256** generator. Behaves identically on every platform, so seeded
/// simulation campaigns reproduce bit-for-bit regardless of toolchain.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) noexcept {
        SplitMix64 sm{seed};
        for (auto& word : s_) word = sm.next();
    }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double next_double() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

/// Deterministic per-round seed: decorrelates consecutive indices so each
/// round gets an independent stream from one campaign base seed.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
    SplitMix64 sm{base_seed ^ ((index + 1) * 0x9e3779b97f4a7c15ULL)};
    return sm.next();
}

}  // namespace cowu

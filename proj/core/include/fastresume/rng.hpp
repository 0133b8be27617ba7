// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef FASTRESUME_RNG_HPP_
#define FASTRESUME_RNG_HPP_

#include <array>
#include <cstdint>
#include <random>

namespace fastresume {

/// Deterministic PRNG wrapper. mt19937_64 output is fully specified by the
/// standard; the helpers below avoid std::*_distribution, whose output is
/// implementation-defined, so identical seeds give identical streams on any
/// platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) via rejection sampling.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    template <std::size_t N>
    std::array<std::uint8_t, N> next_bytes() {
        std::array<std::uint8_t, N> out{};
        for (std::size_t i = 0; i < N; ++i) {
            if (i % 8 == 0) buffer_ = next_u64();
            out[i] = std::uint8_t(buffer_ >> (8 * (i % 8)));
        }
        return out;
    }

    /// Derives an independent stream seed for a named sub-purpose.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) {
        std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (purpose + 1);
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return x;
    }

  private:
    std::mt19937_64 engine_;
    std::uint64_t buffer_ = 0;
};

}  // namespace fastresume

#endif  // FASTRESUME_RNG_HPP_

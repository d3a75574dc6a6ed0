#pragma once

#include <array>
#include <cstdint>

namespace momdens {

// Deterministic 64-bit-seeded generator: xoshiro256++ with splitmix64 state
// expansion. Stream splitting for Monte Carlo is by counter hash — run r of
// an experiment with base seed s draws from Rng(child_seed(s, r)) — so runs
// are independent of scheduling order and reproducible across platforms.
//
// Generator contract (version 1): seeding, child_seed, uniform01 and normal
// are frozen; changing any of them is a breaking change for archived
// experiment outputs.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_)
            word = splitmix64(s);
    }

    static std::uint64_t child_seed(std::uint64_t base, std::uint64_t index) {
        std::uint64_t s = base ^ (0x9E3779B97F4A7C15ULL * (index + 1));
        return splitmix64(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result =
            rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1); safe under log().
    double uniform_open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& state) {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace momdens

#pragma once

#include <cstdint>
#include <limits>

namespace gfra {

/// SplitMix64 step. Used only to expand seeds, never as the simulation stream.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256** engine; satisfies UniformRandomBitGenerator.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed = 0) noexcept {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    friend bool operator==(const Xoshiro256&, const Xoshiro256&) = default;

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4]{};
};

using RandomSource = Xoshiro256;

/// Stream identifiers for the harness. Scenario kinds run under the same master
/// seed never share random numbers.
enum class Stream : std::uint64_t {
    Abstract = 1,
    Phy = 2,
    Detection = 3,
    Sequences = 4,
};

/// Counter-based derivation: the generator for trial `index` depends only on
/// (seed, stream, index), so results do not depend on how trials are scheduled.
inline RandomSource trial_rng(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept {
    std::uint64_t s = seed;
    std::uint64_t mixed = splitmix64(s);
    s = mixed ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL);
    mixed = splitmix64(s);
    s = mixed ^ index;
    return RandomSource(splitmix64(s));
}

}  // namespace gfra

#pragma once

#include "pebblewalk/core.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace pw {

/// Source of fair coin bits xi_1, xi_2, ... consumed one per automaton step.
class BitSource {
public:
    virtual ~BitSource() = default;
    virtual int next_bit() = 0;
};

/// Deterministic fair-bit stream: mt19937_64 blocks consumed MSB-first.
/// Same seed gives the same bit sequence on every platform and build; the
/// generator identifier below is echoed into reports so results stay
/// attributable.
class RngStream final : public BitSource {
public:
    static constexpr const char* kGeneratorId = "mt19937_64/bitblocks-msb/v1";
    static constexpr std::uint64_t kDefaultSeed = 0x5eedf00dULL;

    explicit RngStream(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }

    int next_bit() override {
        if (left_ == 0) {
            buf_ = gen_();
            left_ = 64;
        }
        --left_;
        return static_cast<int>((buf_ >> left_) & 1u);
    }

    /// k bits of the same stream, MSB-first; identical to k next_bit calls.
    std::uint32_t next_bits(int k) {
        std::uint32_t v = 0;
        for (int i = 0; i < k; ++i) v = (v << 1) | static_cast<std::uint32_t>(next_bit());
        return v;
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    std::uint64_t buf_ = 0;
    int left_ = 0;
};

/// Fixed bit script for trace-level tests; throws when exhausted.
class ScriptedBits final : public BitSource {
public:
    explicit ScriptedBits(std::vector<int> bits) : bits_(std::move(bits)) {}

    int next_bit() override {
        if (pos_ >= bits_.size()) fail(Errc::validation, "scripted bit source exhausted");
        return bits_[pos_++];
    }

    std::size_t consumed() const { return pos_; }

private:
    std::vector<int> bits_;
    std::size_t pos_ = 0;
};

/// SplitMix64 finalizer; the building block of per-trial seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Per-trial seed: splitmix64(master xor golden*(index+1)). Pure, documented,
/// and collision-checked in tests over realistic trial counts.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

}  // namespace pw

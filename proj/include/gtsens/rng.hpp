#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace gtsens {

/// Counter-based stream RNG (Philox 4x32-10).
///
/// A draw is a pure function of (seed, replicate, substream, counter), so
/// replicates can be generated in any order, on any thread, with identical
/// results. Each simulated reaction channel gets its own substream.
class StreamRng {
public:
    StreamRng() = default;

    StreamRng(std::uint64_t seed, std::uint64_t replicate, std::uint32_t substream)
        : substream_(substream) {
        std::uint64_t k = mix64(seed ^ mix64(replicate + 0x9E3779B97F4A7C15ULL));
        key0_ = static_cast<std::uint32_t>(k);
        key1_ = static_cast<std::uint32_t>(k >> 32);
    }

    /// One Philox 4x32-10 block; matches the reference known-answer vectors.
    static std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 4> ctr,
                                                     std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = 0xD2511F53ULL * ctr[0];
            std::uint64_t p1 = 0xCD9E8D57ULL * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
            key[0] += 0x9E3779B9U;
            key[1] += 0xBB67AE85U;
        }
        return ctr;
    }

    std::uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        std::array<std::uint32_t, 4> out =
            philox_block({static_cast<std::uint32_t>(block_),
                          static_cast<std::uint32_t>(block_ >> 32), substream_, 0},
                         {key0_, key1_});
        ++block_;
        spare_ = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
        have_spare_ = true;
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    /// Uniform on (0, 1]; never returns 0, so -log() is always finite.
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Unit-rate exponential inter-arrival gap.
    double exponential() { return -std::log(uniform_pos()); }

    static std::uint64_t mix64(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint32_t key0_ = 0;
    std::uint32_t key1_ = 0;
    std::uint32_t substream_ = 0;
    std::uint64_t block_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
};

}  // namespace gtsens

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace treelab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Streams are addressed by (seed, stream): the seed is the Philox key and
/// the stream id occupies the high counter words, so replicate r of a run
/// draws from stream (seed, r) regardless of which thread executes it.
/// Identical (seed, stream) always yields the identical value sequence.
class CounterRng {
  public:
    CounterRng() : CounterRng(0, 0) {}
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    /// Independent generator for substream `s` of the same seed.
    CounterRng split(std::uint64_t s) const {
        std::uint64_t seed =
            static_cast<std::uint64_t>(key_[0]) | (static_cast<std::uint64_t>(key_[1]) << 32);
        return CounterRng(seed, s);
    }

    std::uint32_t next_u32() {
        if (idx_ == 4) refill();
        return block_[idx_++];
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform on [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0,1], safe as a log() argument.
    double next_double_pos() { return 1.0 - next_double(); }

    /// Uniform integer in [0, n), unbiased (rejection).
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        for (;;) {
            std::uint64_t v = next_u64();
            if (v < limit) return v % n;
        }
    }

    bool next_bit() {
        if (bit_count_ == 0) {
            bit_buf_ = next_u64();
            bit_count_ = 64;
        }
        bool b = bit_buf_ & 1;
        bit_buf_ >>= 1;
        --bit_count_;
        return b;
    }

    /// Standard normal via Box-Muller; second value of each pair is cached.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_double_pos();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Exponential with mean 1.
    double next_exponential() { return -std::log(next_double_pos()); }

    /// Raw Philox4x32-10 block function, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = 0xD2511F53ULL * ctr[0];
            std::uint64_t p1 = 0xCD9E8D57ULL * ctr[2];
            std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += 0x9E3779B9U;
            key[1] += 0xBB67AE85U;
        }
        return ctr;
    }

  private:
    void refill() {
        block_ = block({static_cast<std::uint32_t>(block_index_),
                        static_cast<std::uint32_t>(block_index_ >> 32),
                        static_cast<std::uint32_t>(stream_),
                        static_cast<std::uint32_t>(stream_ >> 32)},
                       key_);
        ++block_index_;
        idx_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_ = 0;
    std::uint64_t block_index_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int idx_ = 4;
    std::uint64_t bit_buf_ = 0;
    int bit_count_ = 0;
    double spare_ = 0;
    bool has_spare_ = false;
};

}  // namespace treelab

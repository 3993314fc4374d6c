#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace sle {

// Philox4x32-10 counter-based generator. Streams are addressed by
// (seed, replica, stream, index), so parallel replicas never share state and
// any draw can be reproduced in isolation.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
      const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
      const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
      const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

namespace rng_stream {
// Stream ids keep logically distinct random inputs independent.
inline constexpr std::uint32_t chordal = 0;
inline constexpr std::uint32_t two_sided = 1;
inline constexpr std::uint32_t bridge = 2;
inline constexpr std::uint32_t hcap = 3;
inline constexpr std::uint32_t harmonic = 4;
inline constexpr std::uint32_t test = 9;
}  // namespace rng_stream

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t replica, std::uint32_t stream = 0)
      : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
        replica_lo_(std::uint32_t(replica)),
        replica_hi_stream_(std::uint32_t(replica >> 32) ^ (stream * 0x9E3779B9u)),
        stream_(stream) {}

  // Uniform on (0,1), 53-bit resolution.
  double uniform() {
    const std::uint64_t bits = next64();
    return double(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // One gaussian derived from a fixed counter index; used where draws must be
  // addressable (bridge refinement nodes, per-walker substreams).
  static double gaussian_at(std::uint64_t seed, std::uint64_t replica, std::uint32_t stream,
                            std::uint64_t index) {
    CounterRng g(seed, replica, stream);
    g.index_ = index;
    g.word_ = 4;  // force a fresh block at exactly `index`
    const double u1 = g.uniform_from_block(0);
    const double u2 = g.uniform_from_block(1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  void skip_to(std::uint64_t index) {
    index_ = index;
    word_ = 4;
    have_cached_ = false;
  }

 private:
  std::uint64_t next64() {
    if (word_ >= 4) {
      blk_ = Philox4x32::block({std::uint32_t(index_), std::uint32_t(index_ >> 32),
                                replica_lo_ ^ stream_, replica_hi_stream_},
                               key_);
      ++index_;
      word_ = 0;
    }
    const std::uint64_t lo = blk_[word_];
    const std::uint64_t hi = blk_[word_ + 1];
    word_ += 2;
    return lo | (hi << 32);
  }

  double uniform_from_block(int pair) {
    if (word_ >= 4) {
      blk_ = Philox4x32::block({std::uint32_t(index_), std::uint32_t(index_ >> 32),
                                replica_lo_ ^ stream_, replica_hi_stream_},
                               key_);
      word_ = 0;
    }
    const std::uint64_t lo = blk_[2 * pair];
    const std::uint64_t hi = blk_[2 * pair + 1];
    const std::uint64_t bits = lo | (hi << 32);
    return double(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t replica_lo_, replica_hi_stream_, stream_;
  std::array<std::uint32_t, 4> blk_{};
  std::uint64_t index_ = 0;
  int word_ = 4;
  double cached_ = 0;
  bool have_cached_ = false;
};

}  // namespace sle

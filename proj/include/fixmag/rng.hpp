#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace fixmag {

/// Philox4x32-10 block function (Salmon et al., Random123).
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based generator over Philox4x32-10.
///
/// Stream contract: the 64-bit seed is the Philox key; the upper 64 bits of
/// the counter hold the stream id and the lower 64 bits the block index.
/// Streams with distinct ids never overlap, so independent chains or runs
/// take stream ids 0, 1, 2, ... and may run in any order or concurrently.
/// `fork(tag)` derives a child stream id from (stream, tag) with SplitMix64
/// when a component needs nested substreams.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

  bool bernoulli(double p) noexcept { return uniform() < p; }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  Rng fork(std::uint64_t tag) const noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace fixmag

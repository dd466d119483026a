#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace chiral {

/// SplitMix64 finalizer; used to turn user seeds into Philox keys.
std::uint64_t splitmix64(std::uint64_t x);

/// Philox4x32-10 (Salmon et al., SC'11) as a UniformRandomBitGenerator.
///
/// A generator is identified by (key, stream, tag): the key comes from the
/// user seed, `stream` is usually the draw index and `tag` separates
/// independent uses of the same draw index (matrix entries vs radial
/// variables). Output depends only on these three values, never on which
/// thread runs the draw.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  Philox4x32(std::uint64_t seed, std::uint64_t stream, std::uint32_t tag = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform double in (0, 1) with 53 random bits.
  double uniform();

  /// Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> ctr_{};
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
};

/// Source tags for the counter layout.
inline constexpr std::uint32_t kTagRadial = 1;
inline constexpr std::uint32_t kTagMatrix = 2;
inline constexpr std::uint32_t kTagRadialMax = 3;
/// Added to the tag of a matrix draw that is retried after a solver failure.
inline constexpr std::uint32_t kTagRetry = 0x100;

}  // namespace chiral

#pragma once

// Counter-based random numbers.
//
// Every random quantity in the library is drawn from a Philox4x32-10 generator
// keyed by a 64-bit seed. Independent streams are obtained in two ways:
//
//   * derive_seed(master, stream, index) hashes a master seed together with a
//     named stream and a trial index into a fresh 64-bit key. Matrix, signal,
//     Poisson and probe randomness each use their own Stream tag, so changing
//     how many values one consumer draws never shifts another consumer.
//   * CounterRng(key, substream) places the substream id in the upper half of
//     the 128-bit counter, so one key can serve several disjoint sequences.
//
// All conversions to floating point and integers are written out here (no
// <random> distributions) so results are bit-identical across standard
// library implementations.

#include <array>
#include <cstdint>
#include <limits>

namespace pcs {

enum class Stream : std::uint32_t {
  matrix = 1,
  signal = 2,
  poisson = 3,
  probe = 4,
  isometry = 5,
  sphere = 6,
  trial = 7,
};

/// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Key for trial `index` of `stream` under `master`.
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) noexcept;

/// One Philox4x32-10 block: 10 rounds over a 128-bit counter with a 64-bit key.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

class CounterRng {
 public:
  using result_type = std::uint32_t;

  explicit CounterRng(std::uint64_t key, std::uint64_t substream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;
  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1); never returns 0.
  double uniform_open() noexcept;
  /// Uniform integer on [0, bound) by rejection; bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Fair +1/-1.
  int sign() noexcept;
  /// Standard normal via Box-Muller (one value per call; the pair partner is cached).
  double normal() noexcept;
  /// Exponential with unit rate.
  double exponential() noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t substream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace pcs

#pragma once

#include <cstdint>

namespace tsdistill {

/// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Child seed for item `index` of a parent stream. Used to give every dataset
/// sample its own stream so samples can be produced in any order.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(mix64(parent) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

/// Counter-based generator: draw i of stream (seed, stream) is
/// mix64(key + i * golden_gamma). Output is fully specified here, so the same
/// seed yields the same bits on every platform and standard library.
///
/// Gaussians use Box-Muller on two 53-bit uniforms; the sine draw of each pair
/// is cached for the next call.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix64(seed ^ mix64(stream * 0xD1B54A32D192ED03ULL + 1))) {}

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }

  /// Uniform on [0, 1).
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi); returns lo exactly when lo == hi.
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

  double gaussian() noexcept;

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace tsdistill

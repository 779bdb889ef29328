#include "tsdistill/rng.hpp"

#include <cmath>
#include <numbers>

namespace tsdistill {

std::uint64_t CounterRng::below(std::uint64_t n) noexcept {
  // Rejection on the top of the range keeps every residue equally likely.
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

double CounterRng::gaussian() noexcept {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

}  // namespace tsdistill

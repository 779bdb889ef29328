#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tsdistill {

/// Parameters of the discrete mean-reverting recursion
///   r_t = r_{t-1} + kappa * (r_bar - r_{t-1}) + u_t,   u_t ~ N(0, sigma^2),  r_0 = 0.
struct OuParams {
  double kappa = 0.1;   ///< fraction of the gap to r_bar closed per step, in (0, 1]
  double r_bar = 0.0;   ///< mean level
  double sigma = 1.0;   ///< per-step noise standard deviation
  int n_steps = 100;    ///< points after the initial value
  std::uint64_t seed = 0;

  /// Throws ValidationError naming the first offending field.
  void validate() const;

  bool operator==(const OuParams&) const = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Interval&) const = default;
};

struct ParamRanges {
  Interval kappa{0.01, 0.5};
  Interval r_bar{-50.0, 50.0};
  Interval sigma{0.5, 10.0};
  int n_steps = 100;

  void validate() const;

  bool operator==(const ParamRanges&) const = default;
};

struct TimeSeries {
  std::vector<double> values;  ///< length n_steps + 1, values[0] == 0
  OuParams params;

  std::size_t size() const noexcept { return values.size(); }
};

/// Simulates the recursion. Bit-for-bit deterministic in `params`.
TimeSeries generate_series(const OuParams& params);

/// Draws kappa, r_bar and sigma uniformly from their intervals. The returned
/// params carry `seed`; the series noise uses a different stream of it.
OuParams sample_params(const ParamRanges& ranges, std::uint64_t seed);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact mean and variance of r_t given r_0 = 0:
///   mean     = r_bar * (1 - (1-kappa)^t)
///   variance = sigma^2 * (1 - (1-kappa)^(2t)) / (1 - (1-kappa)^2)
Moments theoretical_moments(const OuParams& params, int t);

}  // namespace tsdistill

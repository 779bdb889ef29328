#include "tsdistill/ou_generator.hpp"

#include <cmath>
#include <string>

#include "tsdistill/errors.hpp"
#include "tsdistill/rng.hpp"

namespace tsdistill {
namespace {

// Independent streams of a sample seed.
constexpr std::uint64_t kParamStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

void check_interval(const Interval& iv, const char* name) {
  if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
    throw ValidationError(std::string(name) + ": interval bounds must be finite");
  if (iv.lo > iv.hi)
    throw ValidationError(std::string(name) + ": empty interval (lo > hi)");
}

}  // namespace

void OuParams::validate() const {
  if (!std::isfinite(kappa) || kappa <= 0.0 || kappa > 1.0)
    throw ValidationError("kappa: must satisfy 0 < kappa <= 1, got " + std::to_string(kappa));
  if (!std::isfinite(r_bar)) throw ValidationError("r_bar: must be finite");
  if (!std::isfinite(sigma) || sigma < 0.0)
    throw ValidationError("sigma: must be finite and >= 0, got " + std::to_string(sigma));
  if (n_steps < 2) throw ValidationError("n_steps: must be >= 2, got " + std::to_string(n_steps));
}

void ParamRanges::validate() const {
  check_interval(kappa, "kappa_range");
  check_interval(r_bar, "r_bar_range");
  check_interval(sigma, "sigma_range");
  if (kappa.lo <= 0.0 || kappa.hi > 1.0)
    throw ValidationError("kappa_range: must lie within (0, 1]");
  if (sigma.lo < 0.0) throw ValidationError("sigma_range: must be non-negative");
  if (n_steps < 2) throw ValidationError("n_steps: must be >= 2, got " + std::to_string(n_steps));
}

TimeSeries generate_series(const OuParams& params) {
  params.validate();
  TimeSeries out;
  out.params = params;
  out.values.resize(static_cast<std::size_t>(params.n_steps) + 1);
  out.values[0] = 0.0;

  CounterRng rng(params.seed, kNoiseStream);
  double r = 0.0;
  for (std::size_t t = 1; t < out.values.size(); ++t) {
    const double u = params.sigma * rng.gaussian();
    r = r + params.kappa * (params.r_bar - r) + u;
    out.values[t] = r;
  }
  return out;
}

OuParams sample_params(const ParamRanges& ranges, std::uint64_t seed) {
  ranges.validate();
  CounterRng rng(seed, kParamStream);
  OuParams p;
  p.kappa = rng.uniform(ranges.kappa.lo, ranges.kappa.hi);
  p.r_bar = rng.uniform(ranges.r_bar.lo, ranges.r_bar.hi);
  p.sigma = rng.uniform(ranges.sigma.lo, ranges.sigma.hi);
  p.n_steps = ranges.n_steps;
  p.seed = seed;
  return p;
}

Moments theoretical_moments(const OuParams& params, int t) {
  params.validate();
  if (t < 0 || t > params.n_steps)
    throw ValidationError("t: must lie in [0, n_steps], got " + std::to_string(t));
  if (t == 0) return {0.0, 0.0};

  const double decay = 1.0 - params.kappa;
  const double mean = params.r_bar * (1.0 - std::pow(decay, t));
  const double s2 = params.sigma * params.sigma;
  // kappa == 1 collapses the geometric sum to its first term.
  const double variance =
      params.kappa == 1.0 ? s2 : s2 * (1.0 - std::pow(decay, 2 * t)) / (1.0 - decay * decay);
  return {mean, variance};
}

}  // namespace tsdistill

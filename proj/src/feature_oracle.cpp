#include "tsdistill/feature_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tsdistill/errors.hpp"

namespace tsdistill {
namespace {

void require_length(std::span<const double> series, std::size_t min_len, const char* op) {
  if (series.size() < min_len) {
    throw ValidationError(std::string(op) + ": series needs at least " + std::to_string(min_len) +
                          " points, got " + std::to_string(series.size()));
  }
  for (double v : series)
    if (!std::isfinite(v)) throw DataError(std::string(op) + ": series contains a non-finite value");
}

double range_of(std::span<const double> series) {
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  return *hi - *lo;
}

}  // namespace

std::string_view to_string(Trend t) noexcept {
  switch (t) {
    case Trend::increasing: return "increasing";
    case Trend::flat: return "flat";
    case Trend::decreasing: return "decreasing";
  }
  return "?";
}

std::string_view to_string(NoiseLevel n) noexcept {
  switch (n) {
    case NoiseLevel::low: return "low";
    case NoiseLevel::medium: return "medium";
    case NoiseLevel::high: return "high";
  }
  return "?";
}

std::string_view to_string(Location l) noexcept {
  switch (l) {
    case Location::beginning: return "beginning";
    case Location::middle: return "middle";
    case Location::end: return "end";
  }
  return "?";
}

std::optional<Trend> trend_from_string(std::string_view s) noexcept {
  for (auto t : {Trend::increasing, Trend::flat, Trend::decreasing})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

std::optional<NoiseLevel> noise_from_string(std::string_view s) noexcept {
  for (auto n : {NoiseLevel::low, NoiseLevel::medium, NoiseLevel::high})
    if (to_string(n) == s) return n;
  return std::nullopt;
}

std::optional<Location> location_from_string(std::string_view s) noexcept {
  for (auto l : {Location::beginning, Location::middle, Location::end})
    if (to_string(l) == s) return l;
  return std::nullopt;
}

void OracleConfig::validate() const {
  if (window && (*window < 1 || *window % 2 == 0))
    throw ValidationError("oracle.window: must be a positive odd integer");
  if (!(flat_threshold >= 0.0) || !std::isfinite(flat_threshold))
    throw ValidationError("oracle.flat_threshold: must be finite and >= 0");
  if (!(noise_low >= 0.0) || !(noise_high >= noise_low) || !std::isfinite(noise_high))
    throw ValidationError("oracle.noise thresholds: need 0 <= noise_low <= noise_high");
}

int default_window(std::size_t n) {
  int w = std::max(5, static_cast<int>(std::lround(static_cast<double>(n) / 10.0)));
  if (w % 2 == 0) ++w;
  const int cap = static_cast<int>(n % 2 == 1 ? n : n - 1);
  return std::max(1, std::min(w, cap));
}

int OracleConfig::window_for(std::size_t n) const {
  if (!window) return default_window(n);
  return std::min(*window, static_cast<int>(n % 2 == 1 ? n : n - 1));
}

std::vector<double> smooth(std::span<const double> series, int window) {
  if (window < 1 || window % 2 == 0)
    throw ValidationError("smooth: window must be a positive odd integer, got " +
                          std::to_string(window));
  if (static_cast<std::size_t>(window) > series.size())
    throw ValidationError("smooth: window " + std::to_string(window) + " exceeds series length " +
                          std::to_string(series.size()));

  const std::size_t n = series.size();
  const std::size_t half = static_cast<std::size_t>(window) / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += series[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

Trend classify_trend(std::span<const double> series, const OracleConfig& cfg) {
  require_length(series, 2, "classify_trend");
  const double range = range_of(series);
  if (range == 0.0) return Trend::flat;

  const auto s = smooth(series, cfg.window_for(series.size()));
  const double delta = s.back() - s.front();
  if (std::abs(delta) / range < cfg.flat_threshold) return Trend::flat;
  return delta > 0.0 ? Trend::increasing : Trend::decreasing;
}

double noise_ratio(std::span<const double> series, const OracleConfig& cfg) {
  require_length(series, 3, "classify_noise");
  const double range = range_of(series);
  if (range == 0.0) return 0.0;

  const auto s = smooth(series, cfg.window_for(series.size()));
  const double n = static_cast<double>(series.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) mean += series[i] - s[i];
  mean /= n;
  double ss = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double d = (series[i] - s[i]) - mean;
    ss += d * d;
  }
  return std::sqrt(ss / n) / range;
}

NoiseLevel noise_level_for_ratio(double ratio, const OracleConfig& cfg) {
  if (ratio < cfg.noise_low) return NoiseLevel::low;
  if (ratio < cfg.noise_high) return NoiseLevel::medium;
  return NoiseLevel::high;
}

NoiseLevel classify_noise(std::span<const double> series, const OracleConfig& cfg) {
  return noise_level_for_ratio(noise_ratio(series, cfg), cfg);
}

Location location_of(std::size_t index, std::size_t n) {
  if (3 * index < n) return Location::beginning;
  if (3 * index >= 2 * n) return Location::end;
  return Location::middle;
}

Extrema locate_extrema(std::span<const double> series) {
  require_length(series, 3, "locate_extrema");
  Extrema e;
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i] > series[e.max_index]) e.max_index = i;
    if (series[i] < series[e.min_index]) e.min_index = i;
  }
  e.max_loc = location_of(e.max_index, series.size());
  e.min_loc = location_of(e.min_index, series.size());
  return e;
}

FeatureLabels compute_labels(std::span<const double> series, const OracleConfig& cfg) {
  cfg.validate();
  const Extrema e = locate_extrema(series);
  FeatureLabels labels;
  labels.trend = classify_trend(series, cfg);
  labels.noise = classify_noise(series, cfg);
  labels.max_loc = e.max_loc;
  labels.min_loc = e.min_loc;
  labels.max_index = e.max_index;
  labels.min_index = e.min_index;
  return labels;
}

std::string fact_sentence(const FeatureLabels& labels, Field field) {
  switch (field) {
    case Field::trend:
      return "The time series shows an overall " + std::string(to_string(labels.trend)) + " trend.";
    case Field::noise:
      return "The noise intensity is " + std::string(to_string(labels.noise)) + ".";
    case Field::extrema:
      break;
  }
  return "The maximum occurs around the " + std::string(to_string(labels.max_loc)) +
         " of the time series, and the minimum occurs around the " +
         std::string(to_string(labels.min_loc)) + " of the time series.";
}

Annotation render_fact_sentences(const FeatureLabels& labels) {
  Annotation a;
  a.trend = fact_sentence(labels, Field::trend);
  a.noise = fact_sentence(labels, Field::noise);
  a.extrema = fact_sentence(labels, Field::extrema);
  a.source = AnnotationSource::oracle;
  return a;
}

}  // namespace tsdistill

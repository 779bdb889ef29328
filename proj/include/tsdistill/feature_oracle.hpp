#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsdistill/annotation.hpp"

namespace tsdistill {

enum class Trend { increasing, flat, decreasing };
enum class NoiseLevel { low, medium, high };
enum class Location { beginning, middle, end };

std::string_view to_string(Trend t) noexcept;
std::string_view to_string(NoiseLevel n) noexcept;
std::string_view to_string(Location l) noexcept;
std::optional<Trend> trend_from_string(std::string_view s) noexcept;
std::optional<NoiseLevel> noise_from_string(std::string_view s) noexcept;
std::optional<Location> location_from_string(std::string_view s) noexcept;

/// Constants of the rule-based feature classifier.
struct OracleConfig {
  /// Moving-average window; unset means default_window(n).
  std::optional<int> window;
  /// |smoothed net change| / range below this reads as flat.
  double flat_threshold = 0.3;
  /// Residual-std / range thresholds: [0, low) low, [low, high) medium, else high.
  double noise_low = 0.05;
  double noise_high = 0.15;

  void validate() const;

  /// Window actually used for a series of n points (odd, <= n).
  int window_for(std::size_t n) const;

  bool operator==(const OracleConfig&) const = default;
};

/// max(5, round(n/10)) bumped to odd, then capped to the largest odd <= n.
int default_window(std::size_t n);

/// Centered moving average; windows at the edges are truncated to the points
/// available. Output length equals input length.
std::vector<double> smooth(std::span<const double> series, int window);

Trend classify_trend(std::span<const double> series, const OracleConfig& cfg = {});

/// stddev(series - smooth(series)) / (max - min), or 0 for a constant series.
double noise_ratio(std::span<const double> series, const OracleConfig& cfg = {});
NoiseLevel noise_level_for_ratio(double ratio, const OracleConfig& cfg = {});
NoiseLevel classify_noise(std::span<const double> series, const OracleConfig& cfg = {});

/// Thirds rule over n points: [0, n/3) beginning, [n/3, 2n/3) middle, [2n/3, n) end.
Location location_of(std::size_t index, std::size_t n);

struct Extrema {
  Location max_loc = Location::beginning;
  Location min_loc = Location::beginning;
  std::size_t max_index = 0;  ///< first occurrence of the global maximum
  std::size_t min_index = 0;  ///< first occurrence of the global minimum
};

Extrema locate_extrema(std::span<const double> series);

struct FeatureLabels {
  Trend trend = Trend::flat;
  NoiseLevel noise = NoiseLevel::low;
  Location max_loc = Location::beginning;
  Location min_loc = Location::beginning;
  std::size_t max_index = 0;
  std::size_t min_index = 0;

  bool operator==(const FeatureLabels&) const = default;
};

FeatureLabels compute_labels(std::span<const double> series, const OracleConfig& cfg = {});

/// Fact-based reference sentence for one field.
std::string fact_sentence(const FeatureLabels& labels, Field field);

/// All three reference sentences; source is oracle.
Annotation render_fact_sentences(const FeatureLabels& labels);

}  // namespace tsdistill

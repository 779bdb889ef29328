#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsdistill {

/// Two-digit integer projection of a series.
struct RescaledSeries {
  std::vector<int> ints;  ///< each in [0, 99], same length as the source
  double source_min = 0.0;
  double source_max = 0.0;

  bool operator==(const RescaledSeries&) const = default;
};

/// Per-series min-max projection x -> round(99 * (x - min) / (max - min)),
/// rounding half away from zero. Codes 0 and 99 are reserved for values equal
/// to the minimum and maximum, so near-extreme values clamp to 1 and 98 and the
/// first-occurrence argmin/argmax survive the projection. A constant series maps
/// to 50 everywhere. Throws DataError on non-finite input.
RescaledSeries rescale_to_integers(std::span<const double> series);

/// "0 7 , 4 2" for {7, 42}: two digits per value, digits separated by a
/// space, values by " , ".
std::string serialize_digits(std::span<const int> values);

/// Exact inverse of serialize_digits. Throws ParseError carrying the byte
/// offset of the first grammar violation.
std::vector<int> parse_digits(std::string_view text);

}  // namespace tsdistill

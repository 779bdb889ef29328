#include "tsdistill/tokenizer_prep.hpp"

#include <algorithm>
#include <cmath>

#include "tsdistill/errors.hpp"

namespace tsdistill {

RescaledSeries rescale_to_integers(std::span<const double> series) {
  if (series.empty()) throw ValidationError("rescale_to_integers: empty series");
  for (double v : series)
    if (!std::isfinite(v)) throw DataError("rescale_to_integers: non-finite value in series");

  const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
  RescaledSeries out;
  out.source_min = *lo_it;
  out.source_max = *hi_it;
  out.ints.reserve(series.size());

  const double range = out.source_max - out.source_min;
  for (double v : series) {
    if (range == 0.0) {
      out.ints.push_back(50);
    } else if (v == out.source_max) {
      out.ints.push_back(99);
    } else if (v == out.source_min) {
      out.ints.push_back(0);
    } else {
      const long code = std::lround(99.0 * (v - out.source_min) / range);
      out.ints.push_back(static_cast<int>(std::clamp(code, 1L, 98L)));
    }
  }
  return out;
}

std::string serialize_digits(std::span<const int> values) {
  std::string out;
  out.reserve(values.size() * 6);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int v = values[i];
    if (v < 0 || v > 99)
      throw ValidationError("serialize_digits: value " + std::to_string(v) + " outside [0, 99]");
    if (i > 0) out += " , ";
    out += static_cast<char>('0' + v / 10);
    out += ' ';
    out += static_cast<char>('0' + v % 10);
  }
  return out;
}

std::vector<int> parse_digits(std::string_view text) {
  auto digit_at = [&](std::size_t pos) {
    if (pos >= text.size()) throw ParseError("parse_digits: unexpected end of input", pos);
    const char c = text[pos];
    if (c < '0' || c > '9')
      throw ParseError(std::string("parse_digits: expected digit, got '") + c + "'", pos);
    return c - '0';
  };
  auto expect = [&](std::size_t pos, char want) {
    if (pos >= text.size()) throw ParseError("parse_digits: unexpected end of input", pos);
    if (text[pos] != want)
      throw ParseError(std::string("parse_digits: expected '") + want + "', got '" + text[pos] + "'",
                       pos);
  };

  std::vector<int> out;
  std::size_t pos = 0;
  for (;;) {
    const int hi = digit_at(pos);
    expect(pos + 1, ' ');
    const int lo = digit_at(pos + 2);
    out.push_back(hi * 10 + lo);
    pos += 3;
    if (pos == text.size()) break;
    expect(pos, ' ');
    expect(pos + 1, ',');
    expect(pos + 2, ' ');
    pos += 3;
  }
  return out;
}

}  // namespace tsdistill

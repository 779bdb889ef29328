#include "tsdistill/annotation.hpp"

#include <utility>

#include <json.hpp>

#include "tsdistill/errors.hpp"

namespace tsdistill {
namespace {

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

// Returns the end (one past the closing brace) of the balanced object that
// starts at `open`, honouring string literals, or npos.
std::size_t balanced_object_end(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

}  // namespace

std::string_view to_string(Field f) noexcept {
  switch (f) {
    case Field::trend: return "trend";
    case Field::noise: return "noise";
    case Field::extrema: return "extrema";
  }
  return "?";
}

std::optional<Field> field_from_string(std::string_view s) noexcept {
  for (Field f : kAllFields)
    if (to_string(f) == s) return f;
  return std::nullopt;
}

std::string_view to_string(AnnotationSource s) noexcept {
  switch (s) {
    case AnnotationSource::llm: return "llm";
    case AnnotationSource::oracle: return "oracle";
    case AnnotationSource::replaced: return "replaced";
  }
  return "?";
}

std::optional<AnnotationSource> source_from_string(std::string_view s) noexcept {
  for (auto src : {AnnotationSource::llm, AnnotationSource::oracle, AnnotationSource::replaced})
    if (to_string(src) == s) return src;
  return std::nullopt;
}

const std::string& Annotation::sentence(Field f) const noexcept {
  switch (f) {
    case Field::trend: return trend;
    case Field::noise: return noise;
    case Field::extrema: break;
  }
  return extrema;
}

std::string& Annotation::sentence(Field f) noexcept {
  return const_cast<std::string&>(std::as_const(*this).sentence(f));
}

std::string Annotation::paragraph() const { return trend + " " + noise + " " + extrema; }

std::string Annotation::to_json_pattern() const {
  using nlohmann::json;
  return "{\"trend\": " + json(trend).dump() + ", \"noise\": " + json(noise).dump() +
         ", \"extrema\": " + json(extrema).dump() + "}";
}

Annotation parse_annotation_json(std::string_view text) {
  using nlohmann::json;

  // Scan candidate objects left to right; the first that parses wins. This
  // skips stray braces in prose before the real payload.
  json obj;
  bool found = false;
  std::size_t error_offset = ParseError::npos;
  for (std::size_t open = text.find('{'); open != std::string_view::npos;
       open = text.find('{', open + 1)) {
    const std::size_t end = balanced_object_end(text, open);
    if (end == std::string_view::npos) {
      if (error_offset == ParseError::npos) error_offset = open;
      continue;
    }
    obj = json::parse(text.substr(open, end - open), nullptr, /*allow_exceptions=*/false);
    if (!obj.is_discarded() && obj.is_object()) {
      found = true;
      break;
    }
    if (error_offset == ParseError::npos) error_offset = open;
  }
  if (!found) {
    throw ParseError(error_offset == ParseError::npos ? "no JSON object found"
                                                      : "malformed JSON object",
                     error_offset);
  }

  Annotation out;
  out.source = AnnotationSource::llm;
  for (Field f : kAllFields) {
    const std::string key(to_string(f));
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError("missing key: " + key);
    if (!it->is_string()) throw ParseError("non-string value for key: " + key);
    out.sentence(f) = trim(it->get<std::string>());
    if (out.sentence(f).empty()) throw ParseError("empty sentence for key: " + key);
  }
  for (const auto& [key, value] : obj.items()) {
    if (!field_from_string(key)) throw ParseError("unexpected key: " + key);
  }
  return out;
}

}  // namespace tsdistill

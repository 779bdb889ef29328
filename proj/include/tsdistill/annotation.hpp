#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace tsdistill {

enum class Field { trend, noise, extrema };

inline constexpr std::array<Field, 3> kAllFields{Field::trend, Field::noise, Field::extrema};

std::string_view to_string(Field f) noexcept;
std::optional<Field> field_from_string(std::string_view s) noexcept;

/// llm: produced by the annotating model; oracle: rendered from computed
/// features; replaced: llm annotation whose extrema sentence was swapped for
/// the oracle one during fact-checking.
enum class AnnotationSource { llm, oracle, replaced };

std::string_view to_string(AnnotationSource s) noexcept;
std::optional<AnnotationSource> source_from_string(std::string_view s) noexcept;

struct Annotation {
  std::string trend;
  std::string noise;
  std::string extrema;
  AnnotationSource source = AnnotationSource::llm;

  const std::string& sentence(Field f) const noexcept;
  std::string& sentence(Field f) noexcept;

  /// The three sentences joined by single spaces, in trend/noise/extrema order.
  std::string paragraph() const;

  /// `{"trend": "...", "noise": "...", "extrema": "..."}`, keys in that order.
  std::string to_json_pattern() const;

  bool operator==(const Annotation&) const = default;
};

/// Extracts the first JSON object in `text`, tolerating surrounding prose and
/// markdown code fences. Exactly the three string keys are required; values
/// are trimmed. Throws ParseError naming the defect. Result source is llm.
Annotation parse_annotation_json(std::string_view text);

}  // namespace tsdistill

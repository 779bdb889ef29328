#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tsdistill/annotation.hpp"
#include "tsdistill/feature_oracle.hpp"

namespace tsdistill {

enum class NliLabel { entailment, neutral, contradiction };

std::string_view to_string(NliLabel l) noexcept;
std::optional<NliLabel> nli_label_from_string(std::string_view s) noexcept;

/// 1 for entailment, 0.5 for neutral, 0 for contradiction.
constexpr double score_of(NliLabel l) noexcept {
  switch (l) {
    case NliLabel::entailment: return 1.0;
    case NliLabel::neutral: return 0.5;
    case NliLabel::contradiction: return 0.0;
  }
  return 0.0;
}

struct NliVerdict {
  NliLabel label = NliLabel::neutral;
  double score = 0.5;

  static NliVerdict of(NliLabel l) noexcept { return {l, score_of(l)}; }
  bool operator==(const NliVerdict&) const = default;
};

/// Extrema slots mentioned in a sentence; either may be missing.
struct ExtremaMention {
  std::optional<Location> max_loc;
  std::optional<Location> min_loc;

  bool operator==(const ExtremaMention&) const = default;
};

using Category = std::variant<Trend, NoiseLevel, ExtremaMention>;

/// Keyword extraction, case-insensitive, word based. Conflicting keywords for
/// one slot yield nothing for that slot.
std::optional<Trend> extract_trend(std::string_view sentence);
std::optional<NoiseLevel> extract_noise(std::string_view sentence);
/// Each location word is attached to the nearest maximum/minimum mention in
/// the same clause (ties go to the preceding one), else to the nearest earlier
/// mention. Returns nullopt when neither slot resolves.
std::optional<ExtremaMention> extract_extrema(std::string_view sentence);

std::optional<Category> extract_category(std::string_view sentence, Field field);

/// Per-field verdict source. Implementations: RuleScorer (offline) and
/// RemoteScorer (the NLI microservice).
class NliScorer {
 public:
  virtual ~NliScorer() = default;
  virtual NliLabel classify(std::string_view premise, std::string_view hypothesis, Field field) = 0;
  virtual std::string name() const = 0;
};

/// Sentence embedding source for the cosine metric.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<std::vector<double>> embed(std::span<const std::string> texts) = 0;
  virtual std::string name() const = 0;
};

/// Categorical NLI: same category entails; increasing/decreasing, low/high,
/// and differing extrema locations contradict; anything else is neutral.
class RuleScorer final : public NliScorer {
 public:
  NliLabel classify(std::string_view premise, std::string_view hypothesis, Field field) override;
  std::string name() const override { return "rule"; }
};

/// Throws ValidationError on empty sentences; scorer errors propagate.
NliVerdict nli_compare(std::string_view premise, std::string_view hypothesis, NliScorer& scorer,
                       Field field);

/// Cosine of two vectors. Throws ValidationError on size mismatch or zero norm.
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace tsdistill

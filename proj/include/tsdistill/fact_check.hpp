#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsdistill/annotation.hpp"
#include "tsdistill/feature_oracle.hpp"
#include "tsdistill/scoring.hpp"

namespace tsdistill {

struct FieldVerdicts {
  NliVerdict trend;
  NliVerdict noise;
  NliVerdict extrema;

  const NliVerdict& of(Field f) const noexcept;
  NliVerdict& of(Field f) noexcept;
  bool operator==(const FieldVerdicts&) const = default;
};

struct CheckedAnnotation {
  Annotation annotation;
  FieldVerdicts verdicts;
  bool replaced = false;  ///< extrema sentence swapped for the oracle sentence
};

/// Compares every sentence against the oracle sentence for the same field
/// (oracle as premise, annotation as hypothesis). A contradicted extrema
/// sentence is replaced by the oracle sentence and the source becomes
/// `replaced`; trend and noise discrepancies are kept as-is.
CheckedAnnotation fact_check_sample(const Annotation& annotation, const FeatureLabels& labels,
                                    NliScorer& scorer);

struct FactCheckItem {
  std::string id;
  Annotation annotation;
  FeatureLabels labels;
};

struct FactCheckReport {
  std::size_t n_samples = 0;
  /// Fraction of samples whose verdict is not contradiction (before replacement).
  double trend_rate = 1.0;
  double noise_rate = 1.0;
  double extrema_rate = 1.0;
  std::vector<std::string> replaced_ids;
  /// Samples kept despite a trend or noise contradiction.
  std::vector<std::string> retained_ids;
  std::string scorer;

  double rate(Field f) const noexcept;
};

struct FactCheckOutcome {
  FactCheckReport report;
  std::vector<CheckedAnnotation> checked;  ///< parallel to the input items
};

/// Runs fact_check_sample over every item. Throws ValidationError when empty.
FactCheckOutcome run_fact_check(std::span<const FactCheckItem> items, NliScorer& scorer);

FactCheckReport agreement_report(std::span<const FactCheckItem> items, NliScorer& scorer);

nlohmann::json to_json(const FactCheckReport& report);

}  // namespace tsdistill

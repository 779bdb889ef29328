#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsdistill/annotation.hpp"
#include "tsdistill/feature_oracle.hpp"
#include "tsdistill/scoring.hpp"

namespace tsdistill {

/// A reference the candidates are scored against.
struct EvalSample {
  std::string id;
  Annotation reference;
  FeatureLabels labels;
};

enum class EvalMode {
  strict,    ///< one JSON answer per sample, parsed with parse_annotation_json
  freetext,  ///< three separate answers per sample, one per field
};

std::string_view to_string(EvalMode m) noexcept;

struct CandidateOutput {
  std::string sample_id;
  std::string text;  ///< strict mode
  std::array<std::string, 3> field_texts;  ///< freetext mode, trend/noise/extrema
};

/// Reads {"id", "text"} (strict) or {"id", "trend_text", "noise_text",
/// "extrema_text"} (freetext) lines.
std::vector<CandidateOutput> load_candidates(const std::filesystem::path& jsonl, EvalMode mode);

/// Cosine of the embeddings of two paragraphs.
double cosine_score(std::string_view reference_paragraph, std::string_view candidate_paragraph,
                    Embedder& embedder);

/// Verdict of (reference as premise, candidate as hypothesis) mapped to {0, 0.5, 1}.
double nli_field_score(std::string_view reference_sentence, std::string_view candidate_sentence,
                       NliScorer& scorer, Field field);

/// nli_field_score against the oracle's fact sentence for `field`.
double feature_field_score(std::string_view candidate_sentence, const FeatureLabels& labels,
                           Field field, NliScorer& scorer);

struct EvalRow {
  std::string id;
  bool parsed = true;
  std::optional<double> cosine;
  std::array<double, 3> nli{};      ///< trend, noise, extrema
  std::array<double, 3> feature{};  ///< trend, noise, extrema

  bool operator==(const EvalRow&) const = default;
};

/// Means over the test set in the row order of the published result tables.
struct EvalReport {
  EvalMode mode = EvalMode::strict;
  std::string scorer;
  std::optional<std::string> embedder;
  std::size_t n_samples = 0;
  std::size_t parse_failures = 0;
  std::optional<double> cosine_mean;  ///< unset when no embedder was configured
  double nli_trend = 0.0;
  double nli_noise = 0.0;
  double nli_extrema = 0.0;
  double feature_trend = 0.0;
  double feature_noise = 0.0;
  double feature_extrema = 0.0;
  std::vector<EvalRow> rows;

  bool operator==(const EvalReport&) const = default;
};

/// Row labels in report order: Cosine, NLI x3, Feature x3.
const std::array<std::string, 7>& report_row_labels();
/// Metric values in the same order as report_row_labels().
std::array<std::optional<double>, 7> report_values(const EvalReport& r);

struct EvalOptions {
  EvalMode mode = EvalMode::strict;
  int jobs = 1;
};

/// Scores every candidate against its test sample. Unknown, duplicate or
/// missing ids and an empty test set raise ValidationError. In strict mode an
/// unparseable candidate scores 0 on every metric and is counted.
EvalReport evaluate(std::span<const EvalSample> test_set, std::span<const CandidateOutput> candidates,
                    NliScorer& scorer, Embedder* embedder, const EvalOptions& options = {});

nlohmann::json to_json(const EvalReport& r);
EvalReport eval_report_from_json(const nlohmann::json& j);
/// Aligned two-column table, one line per metric plus sample/failure counts.
std::string format_report_table(const EvalReport& r);

/// Writes report.json and report.txt into `dir`. Rejects empty reports.
void emit_report(const EvalReport& r, const std::filesystem::path& dir);

}  // namespace tsdistill

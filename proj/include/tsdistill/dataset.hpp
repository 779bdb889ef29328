#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsdistill/annotation.hpp"
#include "tsdistill/config.hpp"
#include "tsdistill/fact_check.hpp"
#include "tsdistill/feature_oracle.hpp"
#include "tsdistill/ou_generator.hpp"
#include "tsdistill/scoring.hpp"
#include "tsdistill/tokenizer_prep.hpp"

namespace tsdistill {

enum class Split { train, test };
std::string_view to_string(Split s) noexcept;

struct Sample {
  std::string id;
  std::size_t index = 0;
  Split split = Split::train;
  TimeSeries series;
  RescaledSeries rescaled;
  FeatureLabels labels;
  std::string image_path;  ///< relative to the dataset directory
  std::optional<Annotation> annotation;
  std::optional<FieldVerdicts> verdicts;      ///< set by the fact-check stage
  std::optional<std::string> original_extrema;  ///< annotator sentence before replacement

  const OuParams& params() const noexcept { return series.params; }
};

nlohmann::json to_json(const Sample& s);
Sample sample_from_json(const nlohmann::json& j);

/// Pipeline progress recorded in the manifest, in order.
enum class BuildStatus { created, generated, annotated, checked, complete };
std::string_view to_string(BuildStatus s) noexcept;

/// Reproducibility record written to manifest.json.
struct DatasetManifest {
  nlohmann::json record;  ///< seeds, ranges, counts, oracle constants, plot, tool version
  nlohmann::json annotator = nullptr;  ///< set once annotations exist
  nlohmann::json scorer = nullptr;     ///< set once fact-checked
  BuildStatus status = BuildStatus::created;

  nlohmann::json to_json() const;
  static DatasetManifest from_json(const nlohmann::json& j);
  int n_samples() const;
  int n_train() const;
  int n_test() const;
};

/// Manifest a fresh build of `cfg` would start from.
DatasetManifest manifest_for(const PipelineConfig& cfg);

/// Generation settings recorded in `m` applied on top of `base`; the result
/// satisfies manifest_for(result).record == m.record.
PipelineConfig config_from_manifest(const DatasetManifest& m, PipelineConfig base = {});

/// Produces annotations for the build. Implementations must be thread-safe.
class Annotator {
 public:
  virtual ~Annotator() = default;
  virtual Annotation annotate(const Sample& sample, const std::filesystem::path& image) = 0;
  /// Manifest summary (mode, model id, prompt hash, ...).
  virtual nlohmann::json describe() const = 0;
};

class MockAnnotator final : public Annotator {
 public:
  explicit MockAnnotator(OracleConfig oracle = {}) : oracle_(std::move(oracle)) {}
  Annotation annotate(const Sample& sample, const std::filesystem::path& image) override;
  nlohmann::json describe() const override;

 private:
  OracleConfig oracle_;
};

class RemoteAnnotator final : public Annotator {
 public:
  explicit RemoteAnnotator(const AnnotatorConfig& cfg) : client_(cfg) {}
  Annotation annotate(const Sample& sample, const std::filesystem::path& image) override;
  nlohmann::json describe() const override;

 private:
  AnnotationClient client_;
};

std::unique_ptr<Annotator> make_annotator(const PipelineConfig& cfg);
std::unique_ptr<NliScorer> make_scorer(const ScorerConfig& cfg);

/// FNV-1a 64-bit of `bytes`, as 16 hex digits.
std::string content_hash(std::string_view bytes);

/// Samples for `cfg` without touching disk: per-sample seeds derived from the
/// dataset seed, labels and rescaling computed, split by seeded shuffle.
std::vector<Sample> make_samples(const PipelineConfig& cfg);

/// dataset_dir/{manifest.json, samples.jsonl, sft_train.jsonl, sft_test.jsonl,
///              images/<id>.png, factcheck.json}
struct DatasetPaths {
  std::filesystem::path dir;

  std::filesystem::path manifest() const { return dir / "manifest.json"; }
  std::filesystem::path samples() const { return dir / "samples.jsonl"; }
  std::filesystem::path sft_train() const { return dir / "sft_train.jsonl"; }
  std::filesystem::path sft_test() const { return dir / "sft_test.jsonl"; }
  std::filesystem::path images() const { return dir / "images"; }
  std::filesystem::path factcheck() const { return dir / "factcheck.json"; }
  std::filesystem::path partial() const { return dir / ".partial"; }
};

std::optional<DatasetManifest> load_manifest(const std::filesystem::path& dataset_dir);
std::vector<Sample> load_samples(const std::filesystem::path& samples_jsonl);

/// Pipeline stages. Each checks the on-disk manifest against `cfg` and
/// refuses (ValidationError with a diff summary) when they disagree, unless
/// `force` wipes the directory first. Stages already recorded as done are
/// skipped, so every stage is idempotent.
DatasetManifest generate_stage(const PipelineConfig& cfg, bool force = false);
/// Annotates samples lacking an annotation. Finished samples are persisted
/// one by one; on failure a progress report is written and the first error
/// is rethrown, leaving the directory resumable.
DatasetManifest annotate_stage(const PipelineConfig& cfg, Annotator& annotator);
DatasetManifest factcheck_stage(const PipelineConfig& cfg, NliScorer& scorer);
DatasetManifest export_stage(const PipelineConfig& cfg);

/// All stages in order; resumes whatever exists on disk.
DatasetManifest build_dataset(const PipelineConfig& cfg, Annotator& annotator, NliScorer& scorer,
                              bool force = false);

/// Completes a partial build described by `manifest`. Refuses with a diff
/// summary when the manifest does not match `cfg`.
DatasetManifest resume_build(const DatasetManifest& manifest, const PipelineConfig& cfg,
                             Annotator& annotator, NliScorer& scorer);

/// SFT prompt: the annotation instruction, a newline, then the serialized digits.
std::string sft_prompt(const Sample& sample);

/// One {"id", "split", "prompt", "completion"} line per sample (optionally
/// only one split). No image references.
void export_sft(std::span<const Sample> samples, const std::filesystem::path& path,
                std::optional<Split> only = std::nullopt);

}  // namespace tsdistill

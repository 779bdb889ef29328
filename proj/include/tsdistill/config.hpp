#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "tsdistill/annotation_client.hpp"
#include "tsdistill/feature_oracle.hpp"
#include "tsdistill/ou_generator.hpp"
#include "tsdistill/plot_render.hpp"

namespace tsdistill {

inline constexpr const char* kToolVersion = "0.1.0";

enum class AnnotatorMode { mock, remote };
enum class ScorerKind { rule, remote };

std::string_view to_string(AnnotatorMode m) noexcept;
std::string_view to_string(ScorerKind k) noexcept;

struct ScorerConfig {
  ScorerKind kind = ScorerKind::rule;
  std::string url = "http://127.0.0.1:8000";
  double timeout_s = 30.0;

  void validate() const;
};

/// Everything that determines a pipeline run. Loaded from JSON; unknown keys
/// are rejected at every level.
struct PipelineConfig {
  std::uint64_t dataset_seed = 2025;
  std::filesystem::path output_dir = "dataset";
  int n_samples = 200;
  int n_train = 180;
  ParamRanges ranges;
  OracleConfig oracle;
  PlotConfig plot;
  AnnotatorMode annotator_mode = AnnotatorMode::remote;
  AnnotatorConfig annotator;
  ScorerConfig scorer;
  int jobs = 4;

  int n_test() const noexcept { return n_samples - n_train; }
  void validate() const;
};

/// Missing keys take defaults. Split counts: give any of n_samples / n_train /
/// n_test; the rest is derived (default split keeps 10% for test).
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace tsdistill

#include "tsdistill/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "tsdistill/config.hpp"
#include "tsdistill/dataset.hpp"
#include "tsdistill/errors.hpp"
#include "tsdistill/eval_harness.hpp"
#include "tsdistill/log.hpp"
#include "tsdistill/plot_render.hpp"
#include "tsdistill/scorer_client.hpp"

namespace tsdistill {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Overrides {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_samples;
  std::optional<int> n_train;
  std::optional<int> jobs;
  bool mock = false;
  std::string scorer;
  std::string scorer_url;
  std::string endpoint;
  std::string model;
  bool force = false;
};

void add_dataset_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Pipeline config file (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out_dir, "Dataset directory (overrides output_dir)");
  cmd->add_option("--jobs", o.jobs, "Worker threads (default 4)");
}

void add_generation_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Dataset seed (overrides dataset_seed)");
  cmd->add_option("--n-samples", o.n_samples, "Number of samples");
  cmd->add_option("--n-train", o.n_train, "Training split size; the rest is test");
}

void add_annotator_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_flag("--mock", o.mock, "Use the offline oracle annotator");
  cmd->add_option("--endpoint", o.endpoint, "Annotator chat-completion URL");
  cmd->add_option("--model", o.model, "Annotator model id");
}

void add_scorer_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--scorer", o.scorer, "NLI scorer")->check(CLI::IsMember({"rule", "remote"}));
  cmd->add_option("--scorer-url", o.scorer_url, "Scorer service base URL");
}

// Later stages without --config pick the generation settings up from the
// dataset's manifest so they need not be repeated on the command line.
PipelineConfig resolve_config(const Overrides& o, bool from_manifest = false) {
  PipelineConfig cfg = o.config_path.empty() ? PipelineConfig{} : load_config(o.config_path);
  if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
  if (from_manifest && o.config_path.empty()) {
    if (const auto m = load_manifest(cfg.output_dir)) cfg = config_from_manifest(*m, cfg);
  }
  if (o.seed) cfg.dataset_seed = *o.seed;
  if (o.n_samples) {
    cfg.n_samples = *o.n_samples;
    if (!o.n_train) cfg.n_train = cfg.n_samples - std::max(1, cfg.n_samples / 10);
  }
  if (o.n_train) cfg.n_train = *o.n_train;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.mock) cfg.annotator_mode = AnnotatorMode::mock;
  if (!o.endpoint.empty()) cfg.annotator.endpoint = o.endpoint;
  if (!o.model.empty()) cfg.annotator.model = o.model;
  if (!o.scorer.empty()) cfg.scorer.kind = o.scorer == "remote" ? ScorerKind::remote : ScorerKind::rule;
  if (!o.scorer_url.empty()) cfg.scorer.url = o.scorer_url;
  cfg.validate();
  return cfg;
}

std::vector<double> read_values_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open values file " + path.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array()) throw DataError(path.string() + ": expected a JSON array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw DataError(path.string() + ": non-numeric entry");
    out.push_back(v.get<double>());
  }
  return out;
}

void print_manifest_summary(const DatasetManifest& m, const fs::path& dir) {
  std::cout << dir.string() << ": " << m.n_samples() << " samples (" << m.n_train() << " train / "
            << m.n_test() << " test), status " << to_string(m.status) << "\n";
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Synthetic mean-reverting time-series datasets and annotation scoring"};
  app.require_subcommand(1);
  bool log_json = false;
  app.add_flag("--log-json", log_json, "Emit logs as JSON lines on stderr");

  Overrides o;

  auto* generate = app.add_subcommand("generate", "Generate series, labels and plots");
  add_dataset_flags(generate, o);
  add_generation_flags(generate, o);
  generate->add_flag("--force", o.force, "Wipe an existing dataset directory first");

  auto* annotate = app.add_subcommand("annotate", "Annotate generated samples");
  add_dataset_flags(annotate, o);
  add_annotator_flags(annotate, o);

  auto* factcheck = app.add_subcommand("factcheck", "Fact-check annotations against the oracle");
  add_dataset_flags(factcheck, o);
  add_scorer_flags(factcheck, o);

  auto* build = app.add_subcommand("build", "Run the full pipeline (resumes partial builds)");
  add_dataset_flags(build, o);
  add_generation_flags(build, o);
  add_annotator_flags(build, o);
  add_scorer_flags(build, o);
  build->add_flag("--force", o.force, "Wipe an existing dataset directory first");

  auto* export_sft_cmd = app.add_subcommand("export-sft", "Write sft_train.jsonl and sft_test.jsonl");
  add_dataset_flags(export_sft_cmd, o);

  std::string dataset_dir, candidates_path, report_dir, mode = "strict", embedder_url;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score candidate annotations on the test split");
  add_dataset_flags(evaluate_cmd, o);
  add_scorer_flags(evaluate_cmd, o);
  evaluate_cmd->add_option("--dataset", dataset_dir, "Dataset directory (default: output_dir)");
  evaluate_cmd->add_option("--candidates", candidates_path, "Candidate JSONL file")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--mode", mode, "Candidate format")->check(CLI::IsMember({"strict", "freetext"}));
  evaluate_cmd->add_option("--report-dir", report_dir, "Where to write report.json/report.txt (default: <dataset>/eval)");
  evaluate_cmd->add_option("--embedder-url", embedder_url, "Scorer service used for cosine (default: --scorer-url when --scorer remote)");
  evaluate_cmd->add_flag("--force", o.force, "Overwrite an existing report");

  std::string output, values_path;
  OuParams rp;
  PlotConfig plot;
  auto* render = app.add_subcommand("render", "Render one series to PNG");
  render->add_option("--output", output, "PNG path")->required();
  render->add_option("--values", values_path, "JSON array of values (instead of simulating)")->check(CLI::ExistingFile);
  render->add_option("--kappa", rp.kappa, "Mean-reversion rate");
  render->add_option("--r-bar", rp.r_bar, "Mean level");
  render->add_option("--sigma", rp.sigma, "Noise standard deviation");
  render->add_option("--n-steps", rp.n_steps, "Steps after r_0");
  render->add_option("--seed", rp.seed, "Series seed");
  render->add_option("--width", plot.width, "Image width");
  render->add_option("--height", plot.height, "Image height");
  render->add_flag("--force", o.force, "Overwrite an existing file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (log_json) Logger::global().use_json_lines();

  try {
    if (generate->parsed()) {
      const auto cfg = resolve_config(o);
      print_manifest_summary(generate_stage(cfg, o.force), cfg.output_dir);
    } else if (annotate->parsed()) {
      const auto cfg = resolve_config(o, /*from_manifest=*/true);
      auto annotator = make_annotator(cfg);
      print_manifest_summary(annotate_stage(cfg, *annotator), cfg.output_dir);
    } else if (factcheck->parsed()) {
      const auto cfg = resolve_config(o, /*from_manifest=*/true);
      auto scorer = make_scorer(cfg.scorer);
      print_manifest_summary(factcheck_stage(cfg, *scorer), cfg.output_dir);
      std::cout << fs::path(cfg.output_dir / "factcheck.json").string() << "\n";
    } else if (build->parsed()) {
      const auto cfg = resolve_config(o);
      auto annotator = make_annotator(cfg);
      auto scorer = make_scorer(cfg.scorer);
      print_manifest_summary(build_dataset(cfg, *annotator, *scorer, o.force), cfg.output_dir);
    } else if (export_sft_cmd->parsed()) {
      const auto cfg = resolve_config(o, /*from_manifest=*/true);
      print_manifest_summary(export_stage(cfg), cfg.output_dir);
    } else if (evaluate_cmd->parsed()) {
      if (o.out_dir.empty()) o.out_dir = dataset_dir;
      const auto cfg = resolve_config(o, /*from_manifest=*/true);
      const fs::path dir = dataset_dir.empty() ? cfg.output_dir : fs::path(dataset_dir);
      const auto manifest = load_manifest(dir);
      if (!manifest) throw ValidationError("no dataset at " + dir.string());
      if (manifest->status < BuildStatus::annotated)
        throw ValidationError("dataset at " + dir.string() + " has no annotations yet");

      std::vector<EvalSample> test_set;
      for (const auto& s : load_samples(dir / "samples.jsonl"))
        if (s.split == Split::test) test_set.push_back({s.id, *s.annotation, s.labels});

      const EvalMode eval_mode = mode == "strict" ? EvalMode::strict : EvalMode::freetext;
      const auto candidates = load_candidates(candidates_path, eval_mode);
      auto scorer = make_scorer(cfg.scorer);
      std::unique_ptr<RemoteScorer> embedder;
      if (!embedder_url.empty()) embedder = std::make_unique<RemoteScorer>(embedder_url, cfg.scorer.timeout_s);
      else if (cfg.scorer.kind == ScorerKind::remote)
        embedder = std::make_unique<RemoteScorer>(cfg.scorer.url, cfg.scorer.timeout_s);

      const fs::path out_dir = report_dir.empty() ? dir / "eval" : fs::path(report_dir);
      if (fs::exists(out_dir / "report.json") && !o.force)
        throw ValidationError("report already exists in " + out_dir.string() + "; pass --force to overwrite");

      const auto report = evaluate(test_set, candidates, *scorer, embedder.get(), {eval_mode, cfg.jobs});
      emit_report(report, out_dir);
      std::cout << format_report_table(report);
    } else if (render->parsed()) {
      if (fs::exists(output) && !o.force)
        throw ValidationError(output + " exists; pass --force to overwrite");
      const std::vector<double> values =
          values_path.empty() ? generate_series(rp).values : read_values_file(values_path);
      render_plot(values, output, plot);
      std::cout << output << "\n";
    }
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    Logger::global().log(LogLevel::error, "cli.error", {{"message", e.what()}, {"exit_code", code}});
    if (log_json) std::fprintf(stderr, "error: %s\n", e.what());
    return code;
  }
  return 0;
}

}  // namespace tsdistill

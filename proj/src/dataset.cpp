#include "tsdistill/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "parallel.hpp"
#include "tsdistill/annotation_client.hpp"
#include "tsdistill/errors.hpp"
#include "tsdistill/log.hpp"
#include "tsdistill/plot_render.hpp"
#include "tsdistill/rng.hpp"
#include "tsdistill/scorer_client.hpp"

namespace tsdistill {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSplitStream = 3;

std::string sample_id(std::size_t index, std::size_t n) {
  const std::size_t width = std::max<std::size_t>(4, std::to_string(n > 0 ? n - 1 : 0).size());
  std::string digits = std::to_string(index);
  return "ts_" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

void write_atomic(const fs::path& path, const std::string& data) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot open " + tmp.string() + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw FileError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw FileError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const fs::path& path) {
  json j = json::parse(read_text(path), nullptr, false);
  if (j.is_discarded()) throw DataError(path.string() + " is not valid JSON");
  return j;
}

template <class Enum, class FromString>
Enum enum_at(const json& j, const char* key, FromString&& from) {
  const auto v = from(j.at(key).get<std::string>());
  if (!v) throw DataError(std::string("unknown value for ") + key + ": " + j.at(key).dump());
  return *v;
}

json labels_json(const FeatureLabels& l) {
  return {{"trend", to_string(l.trend)},     {"noise", to_string(l.noise)},
          {"max_loc", to_string(l.max_loc)}, {"min_loc", to_string(l.min_loc)},
          {"max_index", l.max_index},        {"min_index", l.min_index}};
}

FeatureLabels labels_from_json(const json& j) {
  FeatureLabels l;
  l.trend = enum_at<Trend>(j, "trend", trend_from_string);
  l.noise = enum_at<NoiseLevel>(j, "noise", noise_from_string);
  l.max_loc = enum_at<Location>(j, "max_loc", location_from_string);
  l.min_loc = enum_at<Location>(j, "min_loc", location_from_string);
  l.max_index = j.at("max_index").get<std::size_t>();
  l.min_index = j.at("min_index").get<std::size_t>();
  return l;
}

json annotation_json(const Annotation& a) {
  return {{"trend", a.trend}, {"noise", a.noise}, {"extrema", a.extrema}, {"source", to_string(a.source)}};
}

Annotation annotation_from_json(const json& j) {
  Annotation a;
  a.trend = j.at("trend").get<std::string>();
  a.noise = j.at("noise").get<std::string>();
  a.extrema = j.at("extrema").get<std::string>();
  a.source = enum_at<AnnotationSource>(j, "source", source_from_string);
  return a;
}

json verdicts_json(const FieldVerdicts& v) {
  json j = json::object();
  for (Field f : kAllFields) j[std::string(to_string(f))] = to_string(v.of(f).label);
  return j;
}

FieldVerdicts verdicts_from_json(const json& j) {
  FieldVerdicts v;
  for (Field f : kAllFields)
    v.of(f) = NliVerdict::of(enum_at<NliLabel>(j, std::string(to_string(f)).c_str(), nli_label_from_string));
  return v;
}

void write_samples(const fs::path& path, std::span<const Sample> samples) {
  std::string out;
  for (const auto& s : samples) out += to_json(s).dump() + "\n";
  write_atomic(path, out);
}

void write_manifest(const DatasetPaths& paths, const DatasetManifest& m) {
  write_atomic(paths.manifest(), m.to_json().dump(2) + "\n");
}

std::string diff_summary(const json& have, const json& want) {
  std::string out;
  for (const auto& op : json::diff(have, want)) {
    if (!out.empty()) out += ", ";
    out += op.at("path").get<std::string>();
  }
  return out;
}

void check_compatible(const DatasetManifest& existing, const DatasetManifest& expected,
                      const fs::path& dir) {
  if (existing.record != expected.record) {
    throw ValidationError("dataset at " + dir.string() +
                          " was built with a different configuration (differs at: " +
                          diff_summary(existing.record, expected.record) +
                          "); use --force to rebuild or pick another output directory");
  }
}

// Loads the manifest of an existing dataset directory and checks it against cfg.
DatasetManifest require_manifest(const PipelineConfig& cfg, BuildStatus at_least,
                                 const char* missing_stage) {
  const DatasetPaths paths{cfg.output_dir};
  auto m = load_manifest(paths.dir);
  if (!m) throw ValidationError("no dataset at " + paths.dir.string() + "; run generate first");
  check_compatible(*m, manifest_for(cfg), paths.dir);
  if (m->status < at_least)
    throw ValidationError("dataset at " + paths.dir.string() + " is at stage '" +
                          std::string(to_string(m->status)) + "'; run " + missing_stage + " first");
  return *m;
}

void render_missing_images(const PipelineConfig& cfg, std::span<const Sample> samples) {
  const DatasetPaths paths{cfg.output_dir};
  fs::create_directories(paths.images());
  auto errors = parallel_for(samples.size(), cfg.jobs, [&](std::size_t i) {
    const fs::path img = paths.dir / samples[i].image_path;
    if (!fs::exists(img)) render_plot(samples[i].series.values, img, cfg.plot);
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::string_view to_string(Split s) noexcept { return s == Split::train ? "train" : "test"; }

std::string_view to_string(BuildStatus s) noexcept {
  switch (s) {
    case BuildStatus::created: return "created";
    case BuildStatus::generated: return "generated";
    case BuildStatus::annotated: return "annotated";
    case BuildStatus::checked: return "checked";
    case BuildStatus::complete: return "complete";
  }
  return "?";
}

json to_json(const Sample& s) {
  const OuParams& p = s.params();
  json j{
      {"id", s.id},
      {"index", s.index},
      {"split", to_string(s.split)},
      {"params",
       {{"kappa", p.kappa}, {"r_bar", p.r_bar}, {"sigma", p.sigma}, {"n_steps", p.n_steps}, {"seed", p.seed}}},
      {"series", s.series.values},
      {"rescaled", {{"ints", s.rescaled.ints}, {"min", s.rescaled.source_min}, {"max", s.rescaled.source_max}}},
      {"labels", labels_json(s.labels)},
      {"image", s.image_path},
      {"annotation", s.annotation ? annotation_json(*s.annotation) : json(nullptr)},
      {"fact_check", nullptr},
  };
  if (s.verdicts) {
    j["fact_check"] = {{"verdicts", verdicts_json(*s.verdicts)},
                       {"original_extrema", s.original_extrema ? json(*s.original_extrema) : json(nullptr)}};
  }
  return j;
}

Sample sample_from_json(const json& j) {
  try {
    Sample s;
    s.id = j.at("id").get<std::string>();
    s.index = j.at("index").get<std::size_t>();
    const auto split = j.at("split").get<std::string>();
    if (split != "train" && split != "test") throw DataError("unknown split: " + split);
    s.split = split == "train" ? Split::train : Split::test;
    const json& p = j.at("params");
    s.series.params = {p.at("kappa").get<double>(), p.at("r_bar").get<double>(),
                       p.at("sigma").get<double>(), p.at("n_steps").get<int>(),
                       p.at("seed").get<std::uint64_t>()};
    s.series.values = j.at("series").get<std::vector<double>>();
    const json& r = j.at("rescaled");
    s.rescaled = {r.at("ints").get<std::vector<int>>(), r.at("min").get<double>(), r.at("max").get<double>()};
    s.labels = labels_from_json(j.at("labels"));
    s.image_path = j.at("image").get<std::string>();
    if (!j.at("annotation").is_null()) s.annotation = annotation_from_json(j.at("annotation"));
    if (!j.at("fact_check").is_null()) {
      s.verdicts = verdicts_from_json(j.at("fact_check").at("verdicts"));
      const json& orig = j.at("fact_check").at("original_extrema");
      if (!orig.is_null()) s.original_extrema = orig.get<std::string>();
    }
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed sample record: ") + e.what());
  }
}

json DatasetManifest::to_json() const {
  json j = record;
  j["annotator"] = annotator;
  j["scorer"] = scorer;
  j["status"] = tsdistill::to_string(status);
  return j;
}

DatasetManifest DatasetManifest::from_json(const json& j) {
  if (!j.is_object() || !j.contains("status")) throw DataError("manifest: missing status");
  DatasetManifest m;
  m.record = j;
  m.annotator = j.value("annotator", json(nullptr));
  m.scorer = j.value("scorer", json(nullptr));
  m.record.erase("annotator");
  m.record.erase("scorer");
  m.record.erase("status");
  const auto status = j.at("status").get<std::string>();
  bool known = false;
  for (auto s : {BuildStatus::created, BuildStatus::generated, BuildStatus::annotated,
                 BuildStatus::checked, BuildStatus::complete}) {
    if (to_string(s) == status) {
      m.status = s;
      known = true;
    }
  }
  if (!known) throw DataError("manifest: unknown status " + status);
  return m;
}

int DatasetManifest::n_samples() const { return record.at("n_samples").get<int>(); }
int DatasetManifest::n_train() const { return record.at("split").at("train").get<int>(); }
int DatasetManifest::n_test() const { return record.at("split").at("test").get<int>(); }

DatasetManifest manifest_for(const PipelineConfig& cfg) {
  cfg.validate();
  const auto iv = [](const Interval& i) { return json::array({i.lo, i.hi}); };
  const std::size_t n_points = static_cast<std::size_t>(cfg.ranges.n_steps) + 1;
  DatasetManifest m;
  m.record = {
      {"tool_version", kToolVersion},
      {"dataset_seed", cfg.dataset_seed},
      {"rng", "splitmix64-counter; box-muller gaussians; per-sample seed = derive(dataset_seed, index)"},
      {"param_ranges",
       {{"kappa", iv(cfg.ranges.kappa)},
        {"r_bar", iv(cfg.ranges.r_bar)},
        {"sigma", iv(cfg.ranges.sigma)},
        {"n_steps", cfg.ranges.n_steps},
        {"distribution", "uniform"}}},
      {"n_samples", cfg.n_samples},
      {"split", {{"train", cfg.n_train}, {"test", cfg.n_test()}, {"method", "seeded_shuffle"}}},
      {"oracle",
       {{"window", cfg.oracle.window_for(n_points)},
        {"flat_threshold", cfg.oracle.flat_threshold},
        {"noise_low", cfg.oracle.noise_low},
        {"noise_high", cfg.oracle.noise_high}}},
      {"plot", {{"width", cfg.plot.width}, {"height", cfg.plot.height}, {"line_width", cfg.plot.line_width}}},
  };
  return m;
}

PipelineConfig config_from_manifest(const DatasetManifest& m, PipelineConfig base) {
  try {
    const json& r = m.record;
    const auto iv = [](const json& j) { return Interval{j.at(0).get<double>(), j.at(1).get<double>()}; };
    base.dataset_seed = r.at("dataset_seed").get<std::uint64_t>();
    base.n_samples = r.at("n_samples").get<int>();
    base.n_train = r.at("split").at("train").get<int>();
    const json& pr = r.at("param_ranges");
    base.ranges.kappa = iv(pr.at("kappa"));
    base.ranges.r_bar = iv(pr.at("r_bar"));
    base.ranges.sigma = iv(pr.at("sigma"));
    base.ranges.n_steps = pr.at("n_steps").get<int>();
    const json& o = r.at("oracle");
    base.oracle.window = o.at("window").get<int>();
    base.oracle.flat_threshold = o.at("flat_threshold").get<double>();
    base.oracle.noise_low = o.at("noise_low").get<double>();
    base.oracle.noise_high = o.at("noise_high").get<double>();
    const json& pl = r.at("plot");
    base.plot.width = pl.at("width").get<int>();
    base.plot.height = pl.at("height").get<int>();
    base.plot.line_width = pl.at("line_width").get<int>();
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest: malformed record: ") + e.what());
  }
  return base;
}

Annotation MockAnnotator::annotate(const Sample& sample, const fs::path&) {
  return mock_annotate(sample.series.values, oracle_);
}

json MockAnnotator::describe() const {
  return {{"mode", "mock"}, {"prompt_hash", content_hash(build_prompt())}};
}

Annotation RemoteAnnotator::annotate(const Sample& sample, const fs::path& image) {
  auto result = client_.annotate(image, serialize_digits(sample.rescaled.ints));
  if (result.attempts > 1)
    log_info("annotate.done", {{"id", sample.id}, {"attempts", result.attempts}});
  return std::move(result.annotation);
}

json RemoteAnnotator::describe() const {
  const auto& c = client_.config();
  return {{"mode", "remote"},
          {"model", c.model},
          {"endpoint", c.endpoint},
          {"prompt_hash", content_hash(build_prompt())},
          {"include_digits", c.include_digits},
          {"temperature", c.temperature}};
}

std::unique_ptr<Annotator> make_annotator(const PipelineConfig& cfg) {
  if (cfg.annotator_mode == AnnotatorMode::mock) return std::make_unique<MockAnnotator>(cfg.oracle);
  return std::make_unique<RemoteAnnotator>(cfg.annotator);
}

std::unique_ptr<NliScorer> make_scorer(const ScorerConfig& cfg) {
  cfg.validate();
  if (cfg.kind == ScorerKind::rule) return std::make_unique<RuleScorer>();
  return std::make_unique<RemoteScorer>(cfg.url, cfg.timeout_s);
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 15];
  return out;
}

std::vector<Sample> make_samples(const PipelineConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n_samples);

  // Fisher-Yates with our own generator; std::shuffle is implementation-defined.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterRng rng(cfg.dataset_seed, kSplitStream);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  std::vector<Sample> samples(n);
  for (std::size_t k = 0; k < n; ++k)
    samples[order[k]].split = k < static_cast<std::size_t>(cfg.n_train) ? Split::train : Split::test;

  for (std::size_t i = 0; i < n; ++i) {
    Sample& s = samples[i];
    s.index = i;
    s.id = sample_id(i, n);
    s.series = generate_series(sample_params(cfg.ranges, derive_seed(cfg.dataset_seed, i)));
    s.rescaled = rescale_to_integers(s.series.values);
    s.labels = compute_labels(s.series.values, cfg.oracle);
    s.image_path = "images/" + s.id + ".png";
  }
  return samples;
}

std::optional<DatasetManifest> load_manifest(const fs::path& dataset_dir) {
  const DatasetPaths paths{dataset_dir};
  if (!fs::exists(paths.manifest())) return std::nullopt;
  return DatasetManifest::from_json(read_json_file(paths.manifest()));
}

std::vector<Sample> load_samples(const fs::path& samples_jsonl) {
  std::ifstream in(samples_jsonl);
  if (!in) throw FileError("cannot read " + samples_jsonl.string());
  std::vector<Sample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw DataError(samples_jsonl.string() + ":" + std::to_string(line_no) + ": invalid JSON");
    out.push_back(sample_from_json(j));
  }
  return out;
}

DatasetManifest generate_stage(const PipelineConfig& cfg, bool force) {
  const DatasetPaths paths{cfg.output_dir};
  const DatasetManifest expected = manifest_for(cfg);

  if (auto existing = load_manifest(paths.dir)) {
    if (force) {
      log_info("dataset.wipe", {{"dir", paths.dir.string()}});
      fs::remove_all(paths.dir);
    } else {
      check_compatible(*existing, expected, paths.dir);
      if (existing->status >= BuildStatus::generated) {
        render_missing_images(cfg, load_samples(paths.samples()));
        return *existing;
      }
    }
  } else if (fs::exists(paths.dir) && !fs::is_empty(paths.dir)) {
    throw ValidationError("refusing to write into non-empty directory " + paths.dir.string() +
                          " that holds no dataset manifest");
  }

  fs::create_directories(paths.images());
  DatasetManifest m = expected;
  write_manifest(paths, m);

  const auto samples = make_samples(cfg);
  render_missing_images(cfg, samples);
  write_samples(paths.samples(), samples);
  m.status = BuildStatus::generated;
  write_manifest(paths, m);
  log_info("stage.generate", {{"dir", paths.dir.string()}, {"samples", samples.size()}});
  return m;
}

DatasetManifest annotate_stage(const PipelineConfig& cfg, Annotator& annotator) {
  const DatasetPaths paths{cfg.output_dir};
  DatasetManifest m = require_manifest(cfg, BuildStatus::generated, "generate");
  const json described = annotator.describe();
  if (!m.annotator.is_null() && m.annotator != described) {
    throw ValidationError("dataset at " + paths.dir.string() +
                          " is being annotated with a different annotator (differs at: " +
                          diff_summary(m.annotator, described) + ")");
  }
  if (m.status >= BuildStatus::annotated) return m;
  if (m.annotator.is_null()) {
    m.annotator = described;
    write_manifest(paths, m);
  }

  auto samples = load_samples(paths.samples());
  render_missing_images(cfg, samples);
  fs::create_directories(paths.partial());

  std::vector<std::size_t> pending;
  std::size_t resumed = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].annotation) continue;
    const fs::path rec = paths.partial() / (samples[i].id + ".json");
    if (!fs::exists(rec)) {
      pending.push_back(i);
      continue;
    }
    const json j = read_json_file(rec);
    const json ann = j.at("annotation");
    if (j.value("id", "") != samples[i].id || j.value("hash", "") != content_hash(ann.dump()))
      throw DataError("partial record " + rec.string() + " failed its content-hash check");
    samples[i].annotation = annotation_from_json(ann);
    ++resumed;
  }
  if (resumed > 0) log_info("annotate.resume", {{"reused", resumed}, {"pending", pending.size()}});

  auto errors = parallel_for(
      pending.size(), cfg.jobs,
      [&](std::size_t k) {
        Sample& s = samples[pending[k]];
        Annotation a = annotator.annotate(s, paths.dir / s.image_path);
        const json ann = annotation_json(a);
        const json rec{{"id", s.id}, {"annotation", ann}, {"hash", content_hash(ann.dump())}};
        write_atomic(paths.partial() / (s.id + ".json"), rec.dump() + "\n");
        s.annotation = std::move(a);
      },
      /*stop_on_error=*/true);

  std::exception_ptr first;
  json failed = json::array();
  for (std::size_t k = 0; k < errors.size(); ++k) {
    if (!errors[k]) continue;
    if (!first) first = errors[k];
    std::string what = "unknown error";
    try {
      std::rethrow_exception(errors[k]);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    failed.push_back({{"id", samples[pending[k]].id}, {"error", what}});
  }
  if (first) {
    const auto done = static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [](const Sample& s) { return s.annotation.has_value(); }));
    const json progress{{"completed", done}, {"total", samples.size()}, {"failed", failed}};
    write_atomic(paths.partial() / "progress.json", progress.dump(2) + "\n");
    Logger::global().log(LogLevel::error, "annotate.aborted",
                         {{"completed", done}, {"total", samples.size()}, {"failed", failed.size()}});
    std::rethrow_exception(first);
  }

  write_samples(paths.samples(), samples);
  fs::remove_all(paths.partial());
  m.status = BuildStatus::annotated;
  write_manifest(paths, m);
  log_info("stage.annotate", {{"annotated", pending.size() + resumed}});
  return m;
}

DatasetManifest factcheck_stage(const PipelineConfig& cfg, NliScorer& scorer) {
  const DatasetPaths paths{cfg.output_dir};
  DatasetManifest m = require_manifest(cfg, BuildStatus::annotated, "annotate");
  const json described{{"kind", scorer.name()}};
  if (!m.scorer.is_null() && m.scorer != described)
    throw ValidationError("dataset at " + paths.dir.string() + " was fact-checked with scorer " +
                          m.scorer.dump());
  if (m.status >= BuildStatus::checked) return m;

  auto samples = load_samples(paths.samples());
  std::vector<FactCheckItem> items;
  items.reserve(samples.size());
  for (const auto& s : samples) {
    if (!s.annotation) throw DataError("sample " + s.id + " has no annotation");
    items.push_back({s.id, *s.annotation, s.labels});
  }
  const auto outcome = run_fact_check(items, scorer);

  json per_sample = json::array();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& c = outcome.checked[i];
    if (c.replaced) samples[i].original_extrema = samples[i].annotation->extrema;
    samples[i].annotation = c.annotation;
    samples[i].verdicts = c.verdicts;
    per_sample.push_back({{"id", samples[i].id}, {"verdicts", verdicts_json(c.verdicts)}, {"replaced", c.replaced}});
  }
  json report = to_json(outcome.report);
  report["samples"] = per_sample;

  write_samples(paths.samples(), samples);
  write_atomic(paths.factcheck(), report.dump(2) + "\n");
  m.scorer = described;
  m.status = BuildStatus::checked;
  write_manifest(paths, m);
  log_info("stage.factcheck", {{"trend_rate", outcome.report.trend_rate},
                               {"noise_rate", outcome.report.noise_rate},
                               {"extrema_rate", outcome.report.extrema_rate},
                               {"replaced", outcome.report.replaced_ids.size()}});
  return m;
}

DatasetManifest export_stage(const PipelineConfig& cfg) {
  const DatasetPaths paths{cfg.output_dir};
  DatasetManifest m = require_manifest(cfg, BuildStatus::checked, "factcheck");
  if (m.status >= BuildStatus::complete && fs::exists(paths.sft_train()) && fs::exists(paths.sft_test()))
    return m;
  const auto samples = load_samples(paths.samples());
  export_sft(samples, paths.sft_train(), Split::train);
  export_sft(samples, paths.sft_test(), Split::test);
  m.status = BuildStatus::complete;
  write_manifest(paths, m);
  log_info("stage.export", {{"dir", paths.dir.string()}});
  return m;
}

DatasetManifest build_dataset(const PipelineConfig& cfg, Annotator& annotator, NliScorer& scorer,
                              bool force) {
  generate_stage(cfg, force);
  annotate_stage(cfg, annotator);
  factcheck_stage(cfg, scorer);
  return export_stage(cfg);
}

DatasetManifest resume_build(const DatasetManifest& manifest, const PipelineConfig& cfg,
                             Annotator& annotator, NliScorer& scorer) {
  check_compatible(manifest, manifest_for(cfg), cfg.output_dir);
  return build_dataset(cfg, annotator, scorer, /*force=*/false);
}

std::string sft_prompt(const Sample& sample) {
  return build_prompt() + "\n" + serialize_digits(sample.rescaled.ints);
}

void export_sft(std::span<const Sample> samples, const fs::path& path, std::optional<Split> only) {
  std::string out;
  for (const auto& s : samples) {
    if (only && s.split != *only) continue;
    if (!s.annotation) throw DataError("export_sft: sample " + s.id + " has no annotation");
    nlohmann::ordered_json rec;
    rec["id"] = s.id;
    rec["split"] = to_string(s.split);
    rec["prompt"] = sft_prompt(s);
    rec["completion"] = s.annotation->to_json_pattern();
    out += rec.dump() + "\n";
  }
  write_atomic(path, out);
}

}  // namespace tsdistill

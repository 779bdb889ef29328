#include "tsdistill/config.hpp"

#include <fstream>
#include <set>

#include "tsdistill/errors.hpp"

namespace tsdistill {

using nlohmann::json;

namespace {

// Reads keys from one JSON object and rejects whatever it did not consume.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(where("") + "must be a JSON object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError(where(key) + "has the wrong type");
    }
  }

  void read_u64(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw ValidationError(where(key) + "must be a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void read_int(const std::string& key, int& out) {
    if (!has(key)) return;
    if (!j_.at(key).is_number_integer()) throw ValidationError(where(key) + "must be an integer");
    out = j_.at(key).get<int>();
  }

  void read_interval(const std::string& key, Interval& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ValidationError(where(key) + "must be a [lo, hi] pair of numbers");
    out = {v[0].get<double>(), v[1].get<double>()};
  }

  ObjectReader child(const std::string& key) {
    seen_.insert(key);
    return ObjectReader(j_.at(key), path_ + key + ".");
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ValidationError("unknown config key: " + path_ + key);
  }

  std::string where(const std::string& key) const { return "config key " + path_ + key + ": "; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

std::string_view to_string(AnnotatorMode m) noexcept {
  return m == AnnotatorMode::mock ? "mock" : "remote";
}

std::string_view to_string(ScorerKind k) noexcept {
  return k == ScorerKind::rule ? "rule" : "remote";
}

void ScorerConfig::validate() const {
  if (!(timeout_s > 0.0)) throw ValidationError("scorer.timeout_s: must be > 0");
  if (kind == ScorerKind::remote && url.empty()) throw ValidationError("scorer.url: required for remote scorer");
}

void PipelineConfig::validate() const {
  if (n_samples < 1) throw ValidationError("n_samples: must be >= 1");
  if (n_train < 0 || n_train > n_samples)
    throw ValidationError("split: n_train must lie in [0, n_samples]");
  if (jobs < 1 || jobs > 256) throw ValidationError("jobs: must be in [1, 256]");
  if (output_dir.empty()) throw ValidationError("output_dir: must be non-empty");
  ranges.validate();
  oracle.validate();
  plot.validate();
  if (annotator_mode == AnnotatorMode::remote) annotator.validate();
  scorer.validate();
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig cfg;
  ObjectReader root(j, "");
  root.read_u64("dataset_seed", cfg.dataset_seed);
  if (root.has("output_dir")) {
    std::string dir;
    root.read("output_dir", dir);
    cfg.output_dir = dir;
  }

  std::optional<int> n, train, test;
  auto opt_int = [&](const char* key, std::optional<int>& out) {
    if (!root.has(key)) return;
    int v = 0;
    root.read_int(key, v);
    out = v;
  };
  opt_int("n_samples", n);
  opt_int("n_train", train);
  opt_int("n_test", test);
  if (train && test) {
    if (n && *n != *train + *test)
      throw ValidationError("split: n_train + n_test must equal n_samples");
    n = *train + *test;
  }
  cfg.n_samples = n.value_or(200);
  if (train) {
    cfg.n_train = *train;
  } else if (test) {
    cfg.n_train = cfg.n_samples - *test;
  } else {
    cfg.n_train = cfg.n_samples - std::max(1, cfg.n_samples / 10);
  }

  if (root.has("ranges")) {
    auto r = root.child("ranges");
    r.read_interval("kappa", cfg.ranges.kappa);
    r.read_interval("r_bar", cfg.ranges.r_bar);
    r.read_interval("sigma", cfg.ranges.sigma);
    r.read_int("n_steps", cfg.ranges.n_steps);
    r.finish();
  }
  if (root.has("oracle")) {
    auto o = root.child("oracle");
    if (o.has("window")) {
      int w = 0;
      o.read_int("window", w);
      cfg.oracle.window = w;
    }
    o.read("flat_threshold", cfg.oracle.flat_threshold);
    o.read("noise_low", cfg.oracle.noise_low);
    o.read("noise_high", cfg.oracle.noise_high);
    o.finish();
  }
  if (root.has("plot")) {
    auto p = root.child("plot");
    p.read_int("width", cfg.plot.width);
    p.read_int("height", cfg.plot.height);
    p.read_int("line_width", cfg.plot.line_width);
    p.finish();
  }
  if (root.has("annotator")) {
    auto a = root.child("annotator");
    if (a.has("mode")) {
      std::string mode;
      a.read("mode", mode);
      if (mode == "mock") cfg.annotator_mode = AnnotatorMode::mock;
      else if (mode == "remote") cfg.annotator_mode = AnnotatorMode::remote;
      else throw ValidationError("annotator.mode: expected \"mock\" or \"remote\"");
    }
    a.read("endpoint", cfg.annotator.endpoint);
    a.read("model", cfg.annotator.model);
    a.read("api_key_env", cfg.annotator.api_key_env);
    a.read_int("max_retries", cfg.annotator.max_retries);
    a.read("timeout_s", cfg.annotator.timeout_s);
    a.read("temperature", cfg.annotator.temperature);
    a.read("include_digits", cfg.annotator.include_digits);
    a.read_int("max_in_flight", cfg.annotator.max_in_flight);
    a.read_int("backoff_ms", cfg.annotator.backoff_ms);
    a.finish();
  }
  if (root.has("scorer")) {
    auto s = root.child("scorer");
    if (s.has("kind")) {
      std::string kind;
      s.read("kind", kind);
      if (kind == "rule") cfg.scorer.kind = ScorerKind::rule;
      else if (kind == "remote") cfg.scorer.kind = ScorerKind::remote;
      else throw ValidationError("scorer.kind: expected \"rule\" or \"remote\"");
    }
    s.read("url", cfg.scorer.url);
    s.read("timeout_s", cfg.scorer.timeout_s);
    s.finish();
  }
  root.read_int("jobs", cfg.jobs);
  root.finish();
  cfg.validate();
  return cfg;
}

json to_json(const PipelineConfig& cfg) {
  const auto iv = [](const Interval& i) { return json::array({i.lo, i.hi}); };
  return {
      {"dataset_seed", cfg.dataset_seed},
      {"output_dir", cfg.output_dir.string()},
      {"n_samples", cfg.n_samples},
      {"n_train", cfg.n_train},
      {"n_test", cfg.n_test()},
      {"ranges",
       {{"kappa", iv(cfg.ranges.kappa)},
        {"r_bar", iv(cfg.ranges.r_bar)},
        {"sigma", iv(cfg.ranges.sigma)},
        {"n_steps", cfg.ranges.n_steps}}},
      {"oracle",
       {{"window", cfg.oracle.window ? json(*cfg.oracle.window) : json(nullptr)},
        {"flat_threshold", cfg.oracle.flat_threshold},
        {"noise_low", cfg.oracle.noise_low},
        {"noise_high", cfg.oracle.noise_high}}},
      {"plot",
       {{"width", cfg.plot.width}, {"height", cfg.plot.height}, {"line_width", cfg.plot.line_width}}},
      {"annotator",
       {{"mode", to_string(cfg.annotator_mode)},
        {"endpoint", cfg.annotator.endpoint},
        {"model", cfg.annotator.model},
        {"api_key_env", cfg.annotator.api_key_env},
        {"max_retries", cfg.annotator.max_retries},
        {"timeout_s", cfg.annotator.timeout_s},
        {"temperature", cfg.annotator.temperature},
        {"include_digits", cfg.annotator.include_digits},
        {"max_in_flight", cfg.annotator.max_in_flight},
        {"backoff_ms", cfg.annotator.backoff_ms}}},
      {"scorer",
       {{"kind", to_string(cfg.scorer.kind)}, {"url", cfg.scorer.url}, {"timeout_s", cfg.scorer.timeout_s}}},
      {"jobs", cfg.jobs},
  };
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ValidationError("config file " + path.string() + " is not valid JSON");
  return config_from_json(j);
}

}  // namespace tsdistill

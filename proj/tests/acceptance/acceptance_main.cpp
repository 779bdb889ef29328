// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "test_support.hpp"
#include "tsdistill/dataset.hpp"
#include "tsdistill/errors.hpp"
#include "tsdistill/eval_harness.hpp"
#include "tsdistill/fact_check.hpp"
#include "tsdistill/log.hpp"
#include "tsdistill/rng.hpp"

using namespace tsdistill;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// r_200 over 10,000 seeds against the closed-form AR(1) moments.
Outcome ou_moments() {
  Outcome o;
  const auto t0 = Clock::now();
  const double kappa = 0.1, r_bar = 10.0, sigma = 2.0;
  const int n = 200, N = 10000;

  // Independent closed form.
  const double a = 1.0 - kappa;
  const double mean_ref = r_bar * (1.0 - std::pow(a, n));
  const double var_ref = sigma * sigma * (1.0 - std::pow(a, 2 * n)) / (1.0 - a * a);
  const auto th = theoretical_moments({kappa, r_bar, sigma, n, 0}, n);
  o.require(std::abs(th.mean - mean_ref) < 1e-9 && std::abs(th.variance - var_ref) < 1e-9,
            "theoretical_moments disagrees with the closed form");
  o.require(std::abs(mean_ref - 10.0) < 1e-6 && std::abs(var_ref - 21.05) < 0.01,
            "closed-form reference values are off");

  double sum = 0.0, sum2 = 0.0;
  for (int s = 0; s < N; ++s) {
    const double x = generate_series({kappa, r_bar, sigma, n, derive_seed(1234, s)}).values.back();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / N;
  const double var = (sum2 - N * mean * mean) / (N - 1);
  const double se_mean = std::sqrt(var_ref / N);
  const double se_var = std::sqrt(2.0 * var_ref * var_ref / (N - 1));
  const double z_mean = (mean - mean_ref) / se_mean;
  const double z_var = (var - var_ref) / se_var;
  const double secs = seconds_since(t0);
  o.require(std::abs(z_mean) <= 4.0, fmt("mean %.4f is %.2f SE from %.4f", mean, z_mean, mean_ref));
  o.require(std::abs(z_var) <= 4.0, fmt("variance %.4f is %.2f SE from %.4f", var, z_var, var_ref));
  o.require(secs < 30.0, fmt("took %.1f s (limit 30 s)", secs));
  if (o.ok)
    o.detail = fmt("mean %.4f (z=%.2f), var %.3f (z=%.2f)", mean, z_mean, var, z_var) +
               fmt(", %.2f s", secs);
  return o;
}

// sigma = 0 trajectories follow the deterministic recursion exactly.
Outcome noiseless_exactness() {
  Outcome o;
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> kd(0.01, 0.5), rd(-50.0, 50.0);
  double worst = 0.0;
  int checked = 0;
  auto check = [&](double kappa, double r_bar) {
    const auto x = generate_series({kappa, r_bar, 0.0, 100, gen()}).values;
    for (int t = 0; t <= 100; ++t)
      worst = std::max(worst, std::abs(x[t] - testkit::noiseless_value(kappa, r_bar, t)));
    const Trend want = r_bar > 0 ? Trend::increasing : r_bar < 0 ? Trend::decreasing : Trend::flat;
    const Trend got = classify_trend(x);
    o.require(got == want, fmt("kappa=%.4f r_bar=%.4f classified wrongly", kappa, r_bar));
    ++checked;
  };
  for (int i = 0; i < 100; ++i) check(kd(gen), rd(gen));
  for (int i = 0; i < 10; ++i) check(kd(gen), 0.0);
  o.require(worst <= 1e-9, fmt("max deviation %.3g > 1e-9", worst));
  if (o.ok) o.detail = fmt("%.0f trajectories, max deviation %.2g", checked, worst);
  return o;
}

// Fact sentences map back to their labels; the oracle agrees with itself.
Outcome oracle_round_trip() {
  Outcome o;
  int combos = 0;
  for (auto t : {Trend::increasing, Trend::flat, Trend::decreasing})
    for (auto n : {NoiseLevel::low, NoiseLevel::medium, NoiseLevel::high})
      for (auto mx : {Location::beginning, Location::middle, Location::end})
        for (auto mn : {Location::beginning, Location::middle, Location::end}) {
          FeatureLabels l;
          l.trend = t;
          l.noise = n;
          l.max_loc = mx;
          l.min_loc = mn;
          const auto a = render_fact_sentences(l);
          o.require(extract_category(a.trend, Field::trend) == Category{t}, "trend not recovered: " + a.trend);
          o.require(extract_category(a.noise, Field::noise) == Category{n}, "noise not recovered: " + a.noise);
          o.require(extract_category(a.extrema, Field::extrema) == Category{ExtremaMention{mx, mn}},
                    "extrema not recovered: " + a.extrema);
          ++combos;
        }
  o.require(combos == 81, "expected 81 combinations");

  RuleScorer scorer;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto x = generate_series(sample_params({}, derive_seed(77, s))).values;
    const auto labels = compute_labels(x);
    const auto a = render_fact_sentences(labels);
    for (Field f : kAllFields)
      o.require(feature_field_score(a.sentence(f), labels, f, scorer) == 1.0,
                "oracle sentence scored below 1 for series " + std::to_string(s));
  }
  if (o.ok) o.detail = "81 combinations, 1000 series x 3 fields at 1.0";
  return o;
}

// Two-digit projection: range, extrema positions, serialization, constants.
Outcome rescaling_properties() {
  Outcome o;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto x = generate_series(sample_params({}, derive_seed(55, s))).values;
    const auto r = rescale_to_integers(x).ints;
    o.require(r.size() == x.size(), "length changed");
    o.require(std::all_of(r.begin(), r.end(), [](int v) { return v >= 0 && v <= 99; }),
              "value outside [0, 99] for series " + std::to_string(s));
    o.require(std::max_element(r.begin(), r.end()) - r.begin() == std::max_element(x.begin(), x.end()) - x.begin(),
              "argmax moved for series " + std::to_string(s));
    o.require(std::min_element(r.begin(), r.end()) - r.begin() == std::min_element(x.begin(), x.end()) - x.begin(),
              "argmin moved for series " + std::to_string(s));
    o.require(parse_digits(serialize_digits(r)) == r, "digit round-trip failed for series " + std::to_string(s));
  }
  for (double c : {0.0, -7.25, 1e6}) {
    const auto r = rescale_to_integers(std::vector<double>(101, c)).ints;
    o.require(std::all_of(r.begin(), r.end(), [](int v) { return v == 50; }), "constant series not all 50");
  }
  if (o.ok) o.detail = "1000 series + constant series";
  return o;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Full offline pipeline at 200 samples, twice, byte-for-byte.
Outcome full_scale_build() {
  Outcome o;
  testkit::TempDir tmp("tsd_accept");
  auto run_build = [&](const std::string& name) {
    PipelineConfig cfg;
    cfg.output_dir = tmp / name;
    cfg.annotator_mode = AnnotatorMode::mock;
    MockAnnotator annotator(cfg.oracle);
    RuleScorer scorer;
    return build_dataset(cfg, annotator, scorer);
  };
  const auto t0 = Clock::now();
  const auto m = run_build("a");
  const double secs = seconds_since(t0);
  run_build("b");

  o.require(m.status == BuildStatus::complete, "build did not complete");
  o.require(m.n_samples() == 200 && m.n_train() == 180 && m.n_test() == 20, "split is not 180/20");
  o.require(secs < 120.0, fmt("build took %.1f s (limit 120 s)", secs));

  for (const char* f : {"samples.jsonl", "sft_train.jsonl", "sft_test.jsonl", "manifest.json", "factcheck.json"})
    o.require(testkit::read_file(tmp / "a" / f) == testkit::read_file(tmp / "b" / f),
              std::string(f) + " differs between runs");

  std::size_t train = 0, test = 0;
  for (const char* f : {"sft_train.jsonl", "sft_test.jsonl"}) {
    for (const auto& line : lines_of(testkit::read_file(tmp / "a" / f))) {
      const auto rec = json::parse(line);
      (rec["split"] == "train" ? train : test)++;
      const std::string completion = rec["completion"];
      const auto keys = json::parse(completion);
      o.require(keys.is_object() && keys.size() == 3 && keys.contains("trend") && keys.contains("noise") &&
                    keys.contains("extrema"),
                "completion is not the three-key object: " + completion);
      try {
        parse_annotation_json(completion);
      } catch (const ParseError& e) {
        o.require(false, std::string("completion does not parse: ") + e.what());
      }
    }
  }
  o.require(train == 180 && test == 20, "SFT files do not hold 180/20 records");
  if (o.ok) o.detail = fmt("200 samples (180/20) in %.2f s, byte-identical reruns", secs);
  return o;
}

// Noiseless series with a definite trend and low noise: every field can be
// contradicted by a single category flip.
std::vector<EvalSample> flippable_test_set() {
  std::vector<EvalSample> out;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> kd(0.03, 0.3), rd(5.0, 50.0);
  while (out.size() < 20) {
    const double sign = out.size() % 2 ? 1.0 : -1.0;
    const auto x = generate_series({kd(gen), sign * rd(gen), 0.0, 100, 0}).values;
    const auto l = compute_labels(x);
    if (l.trend == Trend::flat || l.noise != NoiseLevel::low) continue;
    char id[16];
    std::snprintf(id, sizeof id, "t_%02zu", out.size());
    out.push_back({id, render_fact_sentences(l), l});
  }
  return out;
}

Annotation flipped(const EvalSample& s, Field f) {
  FeatureLabels l = s.labels;
  switch (f) {
    case Field::trend: l.trend = l.trend == Trend::increasing ? Trend::decreasing : Trend::increasing; break;
    case Field::noise: l.noise = l.noise == NoiseLevel::low ? NoiseLevel::high : NoiseLevel::low; break;
    case Field::extrema: l.max_loc = l.max_loc == Location::end ? Location::beginning : Location::end; break;
  }
  Annotation a = s.reference;
  a.sentence(f) = fact_sentence(l, f);
  return a;
}

Outcome evaluation_counting() {
  Outcome o;
  const auto ts = flippable_test_set();
  RuleScorer scorer;
  const auto feature_of = [](const EvalReport& r, Field f) {
    return f == Field::trend ? r.feature_trend : f == Field::noise ? r.feature_noise : r.feature_extrema;
  };
  for (Field f : kAllFields) {
    for (std::size_t k : {0u, 1u, 5u, 20u}) {
      std::vector<CandidateOutput> cands;
      for (std::size_t i = 0; i < ts.size(); ++i)
        cands.push_back({ts[i].id, (i < k ? flipped(ts[i], f) : ts[i].reference).to_json_pattern(), {}});
      const auto r = evaluate(ts, cands, scorer, nullptr, {EvalMode::strict, 4});
      const double want = static_cast<double>(20 - k) / 20.0;
      o.require(feature_of(r, f) == want,
                fmt("k=%.0f: feature mean %.4f, expected %.4f", k, feature_of(r, f), want) + " on " +
                    std::string(to_string(f)));
      for (Field g : kAllFields)
        if (g != f) o.require(feature_of(r, g) == 1.0, "an unflipped field moved");
      o.require(r.parse_failures == 0, "unexpected parse failure");
    }
  }

  const std::array<std::string, 7> rows{"Cosine",           "NLI \"trend\"",     "NLI \"noise\"",
                                        "NLI \"extrema\"",  "Feature \"trend\"", "Feature \"noise\"",
                                        "Feature \"extrema\""};
  o.require(report_row_labels() == rows, "report rows differ from the expected row set");
  std::vector<CandidateOutput> cands;
  for (const auto& s : ts) cands.push_back({s.id, s.reference.to_json_pattern(), {}});
  const auto table = format_report_table(evaluate(ts, cands, scorer, nullptr));
  std::size_t pos = 0;
  for (const auto& row : rows) {
    const auto at = table.find(row, pos);
    o.require(at != std::string::npos, "table is missing row " + row);
    if (at != std::string::npos) pos = at + row.size();
  }
  if (o.ok) o.detail = "k in {0,1,5,20} on trend/noise/extrema; 7-row report";
  return o;
}

Outcome fact_check_behavior() {
  Outcome o;
  const auto ts = flippable_test_set();
  RuleScorer scorer;
  std::vector<FactCheckItem> items;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    Annotation a = ts[i].reference;
    a.source = AnnotationSource::llm;
    if (i < 4) a.extrema = flipped(ts[i], Field::extrema).extrema;
    else if (i < 7) a.trend = flipped(ts[i], Field::trend).trend;
    items.push_back({ts[i].id, a, ts[i].labels});
  }
  const auto out = run_fact_check(items, scorer);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& c = out.checked[i];
    if (i < 4) {
      o.require(c.replaced && c.annotation.source == AnnotationSource::replaced,
                "extrema contradiction not flagged for " + items[i].id);
      o.require(c.annotation.extrema == fact_sentence(items[i].labels, Field::extrema),
                "extrema sentence not replaced by the oracle sentence");
    } else {
      o.require(!c.replaced, "sample replaced without an extrema contradiction");
      o.require(c.annotation == items[i].annotation, "annotation changed without an extrema contradiction");
    }
    if (i >= 4 && i < 7) o.require(c.verdicts.trend.label == NliLabel::contradiction, "trend contradiction missed");
  }
  const std::vector<std::string> replaced{"t_00", "t_01", "t_02", "t_03"};
  const std::vector<std::string> retained{"t_04", "t_05", "t_06"};
  o.require(out.report.replaced_ids == replaced, "replaced ids wrong");
  o.require(out.report.retained_ids == retained, "retained ids wrong");
  o.require(out.report.trend_rate == 17.0 / 20.0, "trend agreement not counted");
  o.require(out.report.extrema_rate == 16.0 / 20.0, "extrema agreement not counted");

  std::vector<FactCheckItem> again = items;
  for (std::size_t i = 0; i < again.size(); ++i) again[i].annotation = out.checked[i].annotation;
  const auto second = run_fact_check(again, scorer);
  for (std::size_t i = 0; i < again.size(); ++i)
    o.require(second.checked[i].annotation == out.checked[i].annotation, "second pass changed an annotation");
  o.require(second.report.replaced_ids.empty(), "second pass replaced again");
  o.require(second.report.retained_ids == retained, "second pass lost retained samples");
  if (o.ok) o.detail = "4 replaced, 3 retained, second pass is a no-op";
  return o;
}

}  // namespace

int main() {
  Logger::global().set_min_level(LogLevel::warn);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"ou_moments", ou_moments},
      {"noiseless_exactness", noiseless_exactness},
      {"oracle_round_trip", oracle_round_trip},
      {"rescaling_properties", rescaling_properties},
      {"full_scale_mock_build", full_scale_build},
      {"evaluation_counting", evaluation_counting},
      {"fact_check_behavior", fact_check_behavior},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %-24s %s\n", o.ok ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.ok) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

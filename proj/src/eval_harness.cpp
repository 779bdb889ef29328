#include "tsdistill/eval_harness.hpp"

#include <cstdio>
#include <fstream>
#include <map>

#include "parallel.hpp"
#include "tsdistill/errors.hpp"

namespace tsdistill {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::array<const char*, 3> kFreetextKeys{"trend_text", "noise_text", "extrema_text"};

std::string paragraph_of(const std::array<std::string, 3>& parts) {
  return parts[0] + " " + parts[1] + " " + parts[2];
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> number_or_null(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

void write_text(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot open " + path.string() + " for writing");
  out << data;
  if (!out) throw FileError("write failed for " + path.string());
}

}  // namespace

std::string_view to_string(EvalMode m) noexcept { return m == EvalMode::strict ? "strict" : "freetext"; }

std::vector<CandidateOutput> load_candidates(const fs::path& jsonl, EvalMode mode) {
  std::ifstream in(jsonl);
  if (!in) throw FileError("cannot read candidates file " + jsonl.string());
  std::vector<CandidateOutput> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = jsonl.string() + ":" + std::to_string(line_no) + ": ";
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ValidationError(where + "not a JSON object");
    CandidateOutput c;
    if (!j.contains("id") || !j["id"].is_string()) throw ValidationError(where + "missing string \"id\"");
    c.sample_id = j["id"].get<std::string>();
    if (mode == EvalMode::strict) {
      if (!j.contains("text") || !j["text"].is_string())
        throw ValidationError(where + "strict mode needs a string \"text\"");
      c.text = j["text"].get<std::string>();
    } else {
      for (std::size_t k = 0; k < 3; ++k) {
        if (!j.contains(kFreetextKeys[k]) || !j[kFreetextKeys[k]].is_string())
          throw ValidationError(where + "freetext mode needs a string \"" + kFreetextKeys[k] + "\"");
        c.field_texts[k] = j[kFreetextKeys[k]].get<std::string>();
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

double cosine_score(std::string_view reference_paragraph, std::string_view candidate_paragraph,
                    Embedder& embedder) {
  const std::array<std::string, 2> texts{std::string(reference_paragraph), std::string(candidate_paragraph)};
  const auto vecs = embedder.embed(texts);
  if (vecs.size() != 2) throw DataError("embedder returned the wrong number of vectors");
  return cosine(vecs[0], vecs[1]);
}

double nli_field_score(std::string_view reference_sentence, std::string_view candidate_sentence,
                       NliScorer& scorer, Field field) {
  // A blank answer scores like a failed parse.
  if (candidate_sentence.find_first_not_of(" \t\r\n") == std::string_view::npos) return 0.0;
  return nli_compare(reference_sentence, candidate_sentence, scorer, field).score;
}

double feature_field_score(std::string_view candidate_sentence, const FeatureLabels& labels,
                           Field field, NliScorer& scorer) {
  return nli_field_score(fact_sentence(labels, field), candidate_sentence, scorer, field);
}

const std::array<std::string, 7>& report_row_labels() {
  static const std::array<std::string, 7> labels{
      "Cosine",           "NLI \"trend\"",     "NLI \"noise\"",    "NLI \"extrema\"",
      "Feature \"trend\"", "Feature \"noise\"", "Feature \"extrema\""};
  return labels;
}

std::array<std::optional<double>, 7> report_values(const EvalReport& r) {
  return {r.cosine_mean,   r.nli_trend,     r.nli_noise,      r.nli_extrema,
          r.feature_trend, r.feature_noise, r.feature_extrema};
}

EvalReport evaluate(std::span<const EvalSample> test_set, std::span<const CandidateOutput> candidates,
                    NliScorer& scorer, Embedder* embedder, const EvalOptions& options) {
  if (test_set.empty()) throw ValidationError("evaluate: empty test set");

  std::map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < test_set.size(); ++i)
    if (!index_of.emplace(test_set[i].id, i).second)
      throw ValidationError("evaluate: duplicate test sample id " + test_set[i].id);

  std::vector<const CandidateOutput*> matched(test_set.size(), nullptr);
  for (const auto& c : candidates) {
    const auto it = index_of.find(c.sample_id);
    if (it == index_of.end()) throw ValidationError("evaluate: unknown sample id " + c.sample_id);
    if (matched[it->second]) throw ValidationError("evaluate: duplicate candidate for id " + c.sample_id);
    matched[it->second] = &c;
  }
  for (std::size_t i = 0; i < test_set.size(); ++i)
    if (!matched[i]) throw ValidationError("evaluate: no candidate for sample id " + test_set[i].id);

  EvalReport report;
  report.mode = options.mode;
  report.scorer = scorer.name();
  if (embedder) report.embedder = embedder->name();
  report.n_samples = test_set.size();
  report.rows.resize(test_set.size());

  auto errors = parallel_for(test_set.size(), options.jobs, [&](std::size_t i) {
    const EvalSample& ref = test_set[i];
    const CandidateOutput& cand = *matched[i];
    EvalRow row;
    row.id = ref.id;

    std::array<std::string, 3> sentences;
    if (options.mode == EvalMode::strict) {
      try {
        const Annotation parsed = parse_annotation_json(cand.text);
        for (std::size_t k = 0; k < 3; ++k) sentences[k] = parsed.sentence(kAllFields[k]);
      } catch (const ParseError&) {
        row.parsed = false;
        if (embedder) row.cosine = 0.0;
        report.rows[i] = std::move(row);
        return;
      }
    } else {
      sentences = cand.field_texts;
    }

    if (embedder) row.cosine = cosine_score(ref.reference.paragraph(), paragraph_of(sentences), *embedder);
    for (std::size_t k = 0; k < 3; ++k) {
      const Field f = kAllFields[k];
      row.nli[k] = nli_field_score(ref.reference.sentence(f), sentences[k], scorer, f);
      row.feature[k] = feature_field_score(sentences[k], ref.labels, f, scorer);
    }
    report.rows[i] = std::move(row);
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  const double n = static_cast<double>(report.rows.size());
  std::array<double, 3> nli_sum{}, feat_sum{};
  double cos_sum = 0.0;
  for (const auto& row : report.rows) {
    if (!row.parsed) ++report.parse_failures;
    if (row.cosine) cos_sum += *row.cosine;
    for (std::size_t k = 0; k < 3; ++k) {
      nli_sum[k] += row.nli[k];
      feat_sum[k] += row.feature[k];
    }
  }
  if (embedder) report.cosine_mean = cos_sum / n;
  report.nli_trend = nli_sum[0] / n;
  report.nli_noise = nli_sum[1] / n;
  report.nli_extrema = nli_sum[2] / n;
  report.feature_trend = feat_sum[0] / n;
  report.feature_noise = feat_sum[1] / n;
  report.feature_extrema = feat_sum[2] / n;
  return report;
}

json to_json(const EvalReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"id", row.id},
                    {"parsed", row.parsed},
                    {"cosine", optional_number(row.cosine)},
                    {"nli", {{"trend", row.nli[0]}, {"noise", row.nli[1]}, {"extrema", row.nli[2]}}},
                    {"feature", {{"trend", row.feature[0]}, {"noise", row.feature[1]}, {"extrema", row.feature[2]}}}});
  }
  return {{"mode", to_string(r.mode)},
          {"scorer", r.scorer},
          {"embedder", r.embedder ? json(*r.embedder) : json(nullptr)},
          {"n_samples", r.n_samples},
          {"parse_failures", r.parse_failures},
          {"metrics",
           {{"cosine", optional_number(r.cosine_mean)},
            {"nli_trend", r.nli_trend},
            {"nli_noise", r.nli_noise},
            {"nli_extrema", r.nli_extrema},
            {"feature_trend", r.feature_trend},
            {"feature_noise", r.feature_noise},
            {"feature_extrema", r.feature_extrema}}},
          {"rows", rows}};
}

EvalReport eval_report_from_json(const json& j) {
  try {
    EvalReport r;
    const auto mode = j.at("mode").get<std::string>();
    if (mode != "strict" && mode != "freetext") throw DataError("report: unknown mode " + mode);
    r.mode = mode == "strict" ? EvalMode::strict : EvalMode::freetext;
    r.scorer = j.at("scorer").get<std::string>();
    if (!j.at("embedder").is_null()) r.embedder = j.at("embedder").get<std::string>();
    r.n_samples = j.at("n_samples").get<std::size_t>();
    r.parse_failures = j.at("parse_failures").get<std::size_t>();
    const json& m = j.at("metrics");
    r.cosine_mean = number_or_null(m.at("cosine"));
    r.nli_trend = m.at("nli_trend").get<double>();
    r.nli_noise = m.at("nli_noise").get<double>();
    r.nli_extrema = m.at("nli_extrema").get<double>();
    r.feature_trend = m.at("feature_trend").get<double>();
    r.feature_noise = m.at("feature_noise").get<double>();
    r.feature_extrema = m.at("feature_extrema").get<double>();
    for (const auto& jr : j.at("rows")) {
      EvalRow row;
      row.id = jr.at("id").get<std::string>();
      row.parsed = jr.at("parsed").get<bool>();
      row.cosine = number_or_null(jr.at("cosine"));
      for (std::size_t k = 0; k < 3; ++k) {
        const std::string key(to_string(kAllFields[k]));
        row.nli[k] = jr.at("nli").at(key).get<double>();
        row.feature[k] = jr.at("feature").at(key).get<double>();
      }
      r.rows.push_back(std::move(row));
    }
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

std::string format_report_table(const EvalReport& r) {
  const auto& labels = report_row_labels();
  const auto values = report_values(r);
  std::size_t width = 0;
  for (const auto& l : labels) width = std::max(width, l.size());
  width = std::max(width, std::string("parse failures").size());

  auto pad = [&](const std::string& s) { return s + std::string(width + 2 - s.size(), ' '); };
  std::string out = pad("Metric") + "Score\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    char buf[32];
    if (values[i]) std::snprintf(buf, sizeof buf, "%.3f", *values[i]);
    else std::snprintf(buf, sizeof buf, "n/a");
    out += pad(labels[i]) + buf + "\n";
  }
  out += pad("n samples") + std::to_string(r.n_samples) + "\n";
  out += pad("parse failures") + std::to_string(r.parse_failures) + "\n";
  out += pad("scorer") + r.scorer + "\n";
  out += pad("mode") + std::string(to_string(r.mode)) + "\n";
  return out;
}

void emit_report(const EvalReport& r, const fs::path& dir) {
  if (r.n_samples == 0 || r.rows.empty()) throw ValidationError("emit_report: empty report");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FileError("cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "report.json", to_json(r).dump(2) + "\n");
  write_text(dir / "report.txt", format_report_table(r));
}

}  // namespace tsdistill

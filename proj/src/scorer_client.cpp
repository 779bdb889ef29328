#include "tsdistill/scorer_client.hpp"

#include <algorithm>
#include <cmath>

#include "http.hpp"
#include "tsdistill/errors.hpp"

namespace tsdistill {

using nlohmann::json;

RemoteScorer::RemoteScorer(std::string base_url, double timeout_s)
    : base_url_(std::move(base_url)), timeout_s_(timeout_s) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  http::parse_url(base_url_);
  if (!(timeout_s_ > 0.0)) throw ValidationError("scorer.timeout_s: must be > 0");
}

json RemoteScorer::call(const std::string& path, const json* body) {
  const auto url = http::parse_url(base_url_ + path);
  const http::Response res = body ? http::post_json(url, body->dump(), {}, timeout_s_)
                                  : http::get(url, {}, timeout_s_);
  if (res.status == 0)
    throw TransportError("scorer service unreachable at " + base_url_ + ": " + res.error);
  if (res.status == 503)
    throw TransportError("scorer service unavailable (HTTP 503, models loading?)", 503);
  if (res.status == 400)
    throw ValidationError("scorer service rejected request to " + path + ": " + res.body.substr(0, 200));
  if (res.status < 200 || res.status >= 300)
    throw TransportError("scorer service " + path + " failed with HTTP " + std::to_string(res.status),
                         res.status);
  json j = json::parse(res.body, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw DataError("scorer service " + path + " returned a non-object body");
  return j;
}

RemoteScorer::NliResult RemoteScorer::nli(std::string_view premise, std::string_view hypothesis) {
  if (premise.empty() || hypothesis.empty())
    throw ValidationError("nli: premise and hypothesis must be non-empty");
  const json body{{"premise", premise}, {"hypothesis", hypothesis}};
  const json j = call("/v1/nli", &body);

  NliResult out;
  const auto label = j.contains("label") && j["label"].is_string()
                         ? nli_label_from_string(j["label"].get<std::string>())
                         : std::nullopt;
  if (!label) throw DataError("/v1/nli: missing or unknown label");
  out.label = *label;
  if (!j.contains("probs") || !j["probs"].is_array() || j["probs"].size() != 3)
    throw DataError("/v1/nli: probs must be an array of three numbers");
  double sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j["probs"][i].is_number()) throw DataError("/v1/nli: non-numeric probability");
    out.probs[i] = j["probs"][i].get<double>();
    if (out.probs[i] < 0.0) throw DataError("/v1/nli: negative probability");
    sum += out.probs[i];
  }
  if (std::abs(sum - 1.0) > 1e-4) throw DataError("/v1/nli: probabilities do not sum to 1");
  return out;
}

json RemoteScorer::health() { return call("/v1/health", nullptr); }

NliLabel RemoteScorer::classify(std::string_view premise, std::string_view hypothesis, Field) {
  return nli(premise, hypothesis).label;
}

std::vector<std::vector<double>> RemoteScorer::embed(std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  std::size_t dim = 0;
  for (std::size_t start = 0; start < texts.size(); start += kMaxBatch) {
    const auto batch = texts.subspan(start, std::min(kMaxBatch, texts.size() - start));
    const json body{{"texts", std::vector<std::string>(batch.begin(), batch.end())}};
    const json j = call("/v1/embed", &body);
    if (!j.contains("vectors") || !j["vectors"].is_array() || j["vectors"].size() != batch.size())
      throw DataError("/v1/embed: expected one vector per text");
    for (const auto& v : j["vectors"]) {
      if (!v.is_array() || v.empty()) throw DataError("/v1/embed: malformed vector");
      auto vec = v.get<std::vector<double>>();
      if (dim == 0) dim = vec.size();
      if (vec.size() != dim) throw DataError("/v1/embed: vectors of differing dimension");
      out.push_back(std::move(vec));
    }
    if (j.contains("dim") && j["dim"].is_number_integer() && j["dim"].get<std::size_t>() != dim)
      throw DataError("/v1/embed: dim field disagrees with vector length");
  }
  return out;
}

}  // namespace tsdistill

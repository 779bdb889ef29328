#pragma once

#include <array>
#include <string>

#include <json.hpp>

#include "tsdistill/scoring.hpp"

namespace tsdistill {

/// Client for the scoring microservice:
///   POST /v1/embed  {"texts": [...]}                -> {"vectors": [[...]], "dim": d}
///   POST /v1/nli    {"premise": p, "hypothesis": h} -> {"label": ..., "probs": [e, n, c]}
///   GET  /v1/health                                 -> {"status", "models", "versions"}
/// Connection failures and 503 raise TransportError; 400 raises ValidationError;
/// responses violating the wire contract raise DataError.
class RemoteScorer final : public NliScorer, public Embedder {
 public:
  static constexpr std::size_t kMaxBatch = 64;

  explicit RemoteScorer(std::string base_url, double timeout_s = 30.0);

  struct NliResult {
    NliLabel label = NliLabel::neutral;
    std::array<double, 3> probs{};  ///< entailment, neutral, contradiction
  };

  NliResult nli(std::string_view premise, std::string_view hypothesis);
  nlohmann::json health();

  NliLabel classify(std::string_view premise, std::string_view hypothesis, Field field) override;
  /// Batches of at most kMaxBatch texts per request.
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
  std::string name() const override { return "remote"; }

  const std::string& base_url() const noexcept { return base_url_; }

 private:
  nlohmann::json call(const std::string& path, const nlohmann::json* body);

  std::string base_url_;
  double timeout_s_;
};

}  // namespace tsdistill

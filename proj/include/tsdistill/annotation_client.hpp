#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "tsdistill/annotation.hpp"
#include "tsdistill/feature_oracle.hpp"

namespace tsdistill {

struct AnnotatorConfig {
  std::string endpoint = "https://api.mistral.ai/v1/chat/completions";
  std::string model = "pixtral-large-latest";
  std::string api_key_env = "MISTRAL_API_KEY";
  int max_retries = 3;
  double timeout_s = 60.0;
  double temperature = 0.0;
  /// Append the serialized digit string to the prompt next to the image.
  bool include_digits = false;
  /// Concurrent requests allowed per client.
  int max_in_flight = 4;
  /// First backoff delay after a throttling/unavailable response; doubles per retry.
  int backoff_ms = 500;

  void validate() const;
};

/// The annotation instruction sent with every plot.
const std::string& build_prompt();

/// Chat-completion client for the multimodal annotator. Malformed replies are
/// retried with the parse error fed back as a corrective user turn. 401/403
/// fail immediately; 429/5xx and connection failures back off exponentially.
/// Safe to share between threads; in-flight requests are bounded by
/// max_in_flight.
class AnnotationClient {
 public:
  explicit AnnotationClient(AnnotatorConfig config);
  ~AnnotationClient();
  AnnotationClient(const AnnotationClient&) = delete;
  AnnotationClient& operator=(const AnnotationClient&) = delete;

  struct Result {
    Annotation annotation;
    int attempts = 0;  ///< model replies consumed, including the successful one
  };

  /// Throws TransportError on network/auth failure and AnnotationFormatError
  /// once format retries are exhausted. Never returns a partial annotation.
  Result annotate(const std::filesystem::path& image_path,
                  const std::optional<std::string>& digits = std::nullopt);

  const AnnotatorConfig& config() const noexcept { return config_; }

 private:
  struct Limiter;

  AnnotatorConfig config_;
  std::unique_ptr<Limiter> limiter_;
};

/// One-shot convenience wrapper around AnnotationClient.
Annotation annotate(const std::filesystem::path& image_path, const AnnotatorConfig& config);

/// Offline annotator: the oracle's fact sentences for `series`.
Annotation mock_annotate(std::span<const double> series, const OracleConfig& cfg = {});

std::string base64_encode(std::span<const unsigned char> bytes);

}  // namespace tsdistill

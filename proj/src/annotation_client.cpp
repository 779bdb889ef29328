#include "tsdistill/annotation_client.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <semaphore>
#include <thread>

#include <json.hpp>

#include "http.hpp"
#include "tsdistill/errors.hpp"
#include "tsdistill/log.hpp"

namespace tsdistill {

using nlohmann::json;

struct AnnotationClient::Limiter {
  explicit Limiter(int n) : slots(n) {}
  std::counting_semaphore<1024> slots;
};

namespace {

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

std::vector<unsigned char> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FileError("cannot read image " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// First choice's text; content may be a string or a list of typed parts.
std::string reply_text(const std::string& body) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw DataError("annotator response is not JSON");
  try {
    const json& content = j.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
    std::string text;
    for (const auto& part : content)
      if (part.value("type", "") == "text") text += part.at("text").get<std::string>();
    return text;
  } catch (const json::exception& e) {
    throw DataError(std::string("unexpected annotator response shape: ") + e.what());
  }
}

bool retryable_status(int status) { return status == 0 || status == 429 || status >= 500; }

}  // namespace

void AnnotatorConfig::validate() const {
  if (max_retries < 0) throw ValidationError("annotator.max_retries: must be >= 0");
  if (!(timeout_s > 0.0)) throw ValidationError("annotator.timeout_s: must be > 0");
  if (max_in_flight < 1 || max_in_flight > 1024)
    throw ValidationError("annotator.max_in_flight: must be in [1, 1024]");
  if (backoff_ms < 0) throw ValidationError("annotator.backoff_ms: must be >= 0");
  if (model.empty()) throw ValidationError("annotator.model: must be non-empty");
  http::parse_url(endpoint);
}

const std::string& build_prompt() {
  static const std::string prompt =
      "Describe the time series in three sentences. First sentence: describe trend "
      "(increasing/decreasing/flat). Second sentence: noise intensity (low/medium/high). Third "
      "sentence: approximate localisation of global maximum (beginning/middle/end) and global "
      "minimum (beginning/middle/end).\n"
      "Put the description in a JSON format with the following pattern\n"
      "{ \"trend\": <sentence1>,\n"
      "  \"noise\": <sentence2>,\n"
      "  \"extrema\": <sentence3> }";
  return prompt;
}

std::string base64_encode(std::span<const unsigned char> bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const unsigned v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i < bytes.size()) {
    unsigned v = bytes[i] << 16;
    if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

AnnotationClient::AnnotationClient(AnnotatorConfig config)
    : config_(std::move(config)) {
  config_.validate();
  limiter_ = std::make_unique<Limiter>(config_.max_in_flight);
}

AnnotationClient::~AnnotationClient() = default;

AnnotationClient::Result AnnotationClient::annotate(const std::filesystem::path& image_path,
                                                    const std::optional<std::string>& digits) {
  const auto url = http::parse_url(config_.endpoint);
  const auto image = read_file(image_path);

  std::string prompt = build_prompt();
  if (config_.include_digits && digits)
    prompt += "\nThe time series values, rescaled to 00-99, are:\n" + *digits;

  json messages = json::array();
  messages.push_back({{"role", "user"},
                      {"content",
                       json::array({{{"type", "text"}, {"text", prompt}},
                                    {{"type", "image_url"},
                                     {"image_url",
                                      {{"url", "data:image/png;base64," + base64_encode(image)}}}}})}});

  http::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
    headers.emplace_back("Authorization", std::string("Bearer ") + key);

  std::string last_reply;
  int format_failures = 0;
  int transport_retries = 0;
  int attempts = 0;
  for (;;) {
    const json request{{"model", config_.model},
                       {"temperature", config_.temperature},
                       {"messages", messages}};
    http::Response res;
    {
      SlotGuard slot(limiter_->slots);
      res = http::post_json(url, request.dump(), headers, config_.timeout_s);
    }

    if (res.status == 401 || res.status == 403) {
      throw TransportError("annotator rejected credentials (HTTP " + std::to_string(res.status) +
                               "); check $" + config_.api_key_env,
                           res.status);
    }
    if (retryable_status(res.status)) {
      if (transport_retries >= config_.max_retries) {
        throw TransportError(res.status == 0 ? "annotator unreachable: " + res.error
                                             : "annotator failed with HTTP " +
                                                   std::to_string(res.status),
                             res.status);
      }
      const auto delay = std::chrono::milliseconds(config_.backoff_ms) * (1LL << transport_retries);
      ++transport_retries;
      log_warn("annotate.backoff", {{"image", image_path.filename().string()},
                                    {"status", res.status},
                                    {"delay_ms", delay.count()},
                                    {"retry", transport_retries}});
      std::this_thread::sleep_for(delay);
      continue;
    }
    if (res.status < 200 || res.status >= 300) {
      throw TransportError("annotator failed with HTTP " + std::to_string(res.status) + ": " +
                               res.body.substr(0, 200),
                           res.status);
    }

    ++attempts;
    last_reply = reply_text(res.body);
    try {
      Annotation a = parse_annotation_json(last_reply);
      a.source = AnnotationSource::llm;
      return {std::move(a), attempts};
    } catch (const ParseError& e) {
      if (format_failures >= config_.max_retries) {
        throw AnnotationFormatError("annotation format retries exhausted after " +
                                        std::to_string(attempts) + " replies: " + e.what(),
                                    last_reply);
      }
      ++format_failures;
      log_warn("annotate.retry", {{"image", image_path.filename().string()},
                                  {"retry", format_failures},
                                  {"reason", e.what()}});
      messages.push_back({{"role", "assistant"}, {"content", last_reply}});
      messages.push_back(
          {{"role", "user"},
           {"content", std::string("Your reply could not be parsed (") + e.what() +
                           "). Answer again with only the JSON object with the string keys "
                           "\"trend\", \"noise\" and \"extrema\"."}});
    }
  }
}

Annotation annotate(const std::filesystem::path& image_path, const AnnotatorConfig& config) {
  AnnotationClient client(config);
  return client.annotate(image_path).annotation;
}

Annotation mock_annotate(std::span<const double> series, const OracleConfig& cfg) {
  return render_fact_sentences(compute_labels(series, cfg));
}

}  // namespace tsdistill

#pragma once

#include <functional>
#include <mutex>
#include <string>
#include <string_view>

#include <json.hpp>

namespace tsdistill {

enum class LogLevel { debug, info, warn, error };

std::string_view to_string(LogLevel l) noexcept;

struct LogEvent {
  LogLevel level = LogLevel::info;
  std::string event;      ///< dotted event name, e.g. "annotate.retry"
  nlohmann::json fields;  ///< structured payload (object)
};

/// Process-wide structured logger. The default sink writes a human-readable
/// line to stderr; use_json_lines() switches to one JSON object per line.
class Logger {
 public:
  using Sink = std::function<void(const LogEvent&)>;

  static Logger& global();

  void log(LogLevel level, std::string event, nlohmann::json fields = nlohmann::json::object());

  /// Replaces the sink; returns the previous one so tests can restore it.
  Sink set_sink(Sink sink);
  void set_min_level(LogLevel level);
  void use_json_lines();
  void use_text();

 private:
  Logger();

  std::mutex mu_;
  Sink sink_;
  LogLevel min_level_ = LogLevel::info;
};

inline void log_info(std::string event, nlohmann::json fields = nlohmann::json::object()) {
  Logger::global().log(LogLevel::info, std::move(event), std::move(fields));
}
inline void log_warn(std::string event, nlohmann::json fields = nlohmann::json::object()) {
  Logger::global().log(LogLevel::warn, std::move(event), std::move(fields));
}

}  // namespace tsdistill

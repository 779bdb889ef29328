#include "tsdistill/log.hpp"

#include <cstdio>

namespace tsdistill {
namespace {

void text_sink(const LogEvent& e) {
  std::string line = "[" + std::string(to_string(e.level)) + "] " + e.event;
  for (const auto& [key, value] : e.fields.items())
    line += " " + key + "=" + (value.is_string() ? value.get<std::string>() : value.dump());
  std::fprintf(stderr, "%s\n", line.c_str());
}

void json_sink(const LogEvent& e) {
  nlohmann::json j = e.fields;
  j["level"] = to_string(e.level);
  j["event"] = e.event;
  std::fprintf(stderr, "%s\n", j.dump().c_str());
}

}  // namespace

std::string_view to_string(LogLevel l) noexcept {
  switch (l) {
    case LogLevel::debug: return "debug";
    case LogLevel::info: return "info";
    case LogLevel::warn: return "warn";
    case LogLevel::error: return "error";
  }
  return "?";
}

Logger::Logger() : sink_(text_sink) {}

Logger& Logger::global() {
  static Logger logger;
  return logger;
}

void Logger::log(LogLevel level, std::string event, nlohmann::json fields) {
  std::lock_guard lock(mu_);
  if (level < min_level_ || !sink_) return;
  sink_(LogEvent{level, std::move(event), std::move(fields)});
}

Logger::Sink Logger::set_sink(Sink sink) {
  std::lock_guard lock(mu_);
  std::swap(sink, sink_);
  return sink;
}

void Logger::set_min_level(LogLevel level) {
  std::lock_guard lock(mu_);
  min_level_ = level;
}

void Logger::use_json_lines() { set_sink(json_sink); }
void Logger::use_text() { set_sink(text_sink); }

}  // namespace tsdistill

#include "ordcap/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace ordcap {

namespace {

LogLevel level_from_env() {
  const char* raw = std::getenv("ORDERED_CAPACITY_LOG");
  if (raw == nullptr) return LogLevel::Warn;
  const std::string value(raw);
  if (value == "error") return LogLevel::Error;
  if (value == "info") return LogLevel::Info;
  if (value == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

std::atomic<int>& threshold() {
  static std::atomic<int> value{static_cast<int>(level_from_env())};
  return value;
}

const char* tag(LogLevel level) {
  switch (level) {
    case LogLevel::Error:
      return "error";
    case LogLevel::Warn:
      return "warn";
    case LogLevel::Info:
      return "info";
    case LogLevel::Debug:
      return "debug";
  }
  return "?";
}

}  // namespace

LogLevel log_threshold() { return static_cast<LogLevel>(threshold().load()); }

void set_log_threshold(LogLevel level) { threshold().store(static_cast<int>(level)); }

void log(LogLevel level, std::string_view message) {
  if (static_cast<int>(level) > threshold().load()) return;
  static std::mutex sink;
  std::lock_guard lock(sink);
  std::cerr << "[ordcap " << tag(level) << "] " << message << '\n';
}

}  // namespace ordcap

#pragma once

#include <string_view>

namespace ordcap {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Threshold read once from ORDERED_CAPACITY_LOG (error|warn|info|debug, default warn).
LogLevel log_threshold();
void set_log_threshold(LogLevel level);

void log(LogLevel level, std::string_view message);

inline void log_error(std::string_view message) { log(LogLevel::Error, message); }
inline void log_warn(std::string_view message) { log(LogLevel::Warn, message); }
inline void log_info(std::string_view message) { log(LogLevel::Info, message); }
inline void log_debug(std::string_view message) { log(LogLevel::Debug, message); }

}  // namespace ordcap

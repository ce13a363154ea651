#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

namespace newsrag {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3 };

void set_log_level(LogLevel level);
LogLevel log_level();

// "debug" | "info" | "warn" | "error"; throws Error(InvalidConfig) otherwise.
LogLevel parse_log_level(std::string_view name);

using LogField = std::pair<std::string_view, std::string>;

// Structured line to stderr: `ts=<iso> level=<lvl> msg="..." key=value ...`
void log(LogLevel level, std::string_view message, std::initializer_list<LogField> fields = {});

inline void log_debug(std::string_view msg, std::initializer_list<LogField> f = {}) { log(LogLevel::kDebug, msg, f); }
inline void log_info(std::string_view msg, std::initializer_list<LogField> f = {}) { log(LogLevel::kInfo, msg, f); }
inline void log_warn(std::string_view msg, std::initializer_list<LogField> f = {}) { log(LogLevel::kWarn, msg, f); }
inline void log_error(std::string_view msg, std::initializer_list<LogField> f = {}) { log(LogLevel::kError, msg, f); }

}  // namespace newsrag

#include "newsrag/logging.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <mutex>
#include <sstream>

#include "newsrag/error.hpp"
#include "newsrag/time_utc.hpp"

namespace newsrag {
namespace {

std::atomic<LogLevel> g_level{LogLevel::kInfo};
std::mutex g_mutex;

const char* level_name(LogLevel l) {
  switch (l) {
    case LogLevel::kDebug: return "debug";
    case LogLevel::kInfo: return "info";
    case LogLevel::kWarn: return "warn";
    case LogLevel::kError: return "error";
  }
  return "info";
}

bool needs_quoting(std::string_view v) {
  if (v.empty()) return true;
  for (char c : v) {
    if (c == ' ' || c == '"' || c == '=' || c == '\n' || c == '\t') return true;
  }
  return false;
}

void append_value(std::ostringstream& out, std::string_view v) {
  if (!needs_quoting(v)) {
    out << v;
    return;
  }
  out << '"';
  for (char c : v) {
    if (c == '"' || c == '\\') out << '\\';
    if (c == '\n') {
      out << "\\n";
      continue;
    }
    out << c;
  }
  out << '"';
}

}  // namespace

void set_log_level(LogLevel level) { g_level.store(level); }
LogLevel log_level() { return g_level.load(); }

LogLevel parse_log_level(std::string_view name) {
  if (name == "debug") return LogLevel::kDebug;
  if (name == "info") return LogLevel::kInfo;
  if (name == "warn") return LogLevel::kWarn;
  if (name == "error") return LogLevel::kError;
  throw Error(ErrorCode::InvalidConfig, "unknown log level: " + std::string(name));
}

void log(LogLevel level, std::string_view message, std::initializer_list<LogField> fields) {
  if (level < g_level.load()) return;

  const auto now = std::chrono::system_clock::now();
  const UtcMillis ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();

  std::ostringstream out;
  out << "ts=" << format_utc(ms) << " level=" << level_name(level) << " msg=";
  append_value(out, message);
  for (const auto& [key, value] : fields) {
    out << ' ' << key << '=';
    append_value(out, value);
  }
  out << '\n';

  std::lock_guard<std::mutex> lock(g_mutex);
  std::fputs(out.str().c_str(), stderr);
}

}  // namespace newsrag

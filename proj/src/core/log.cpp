#include "core/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace beamsweep {
namespace {

LogLevel parse_level(const char* value) {
  if (value == nullptr) return LogLevel::Warn;
  const std::string v(value);
  if (v == "off" || v == "none") return LogLevel::Off;
  if (v == "error") return LogLevel::Error;
  if (v == "warn" || v == "warning") return LogLevel::Warn;
  if (v == "info") return LogLevel::Info;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

const char* level_tag(LogLevel level) {
  switch (level) {
    case LogLevel::Error: return "error";
    case LogLevel::Warn: return "warn";
    case LogLevel::Info: return "info";
    case LogLevel::Debug: return "debug";
    default: return "?";
  }
}

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

LogLevel log_level() {
  static const LogLevel level = parse_level(std::getenv("BEAMSWEEP_LOG"));
  return level;
}

bool log_enabled(LogLevel level) {
  return static_cast<int>(level) <= static_cast<int>(log_level());
}

void log_write(LogLevel level, const std::string& message) {
  std::lock_guard<std::mutex> lock(log_mutex());
  std::cerr << "[beamsweep " << level_tag(level) << "] " << message << "\n";
}

}  // namespace beamsweep

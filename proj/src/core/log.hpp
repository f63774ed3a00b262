// Minimal stderr logger. Verbosity is selected once per process from the
// BEAMSWEEP_LOG environment variable: off, error, warn (default), info, debug.
#pragma once

#include <sstream>
#include <string>

namespace beamsweep {

enum class LogLevel { Off = 0, Error, Warn, Info, Debug };

LogLevel log_level();
bool log_enabled(LogLevel level);
void log_write(LogLevel level, const std::string& message);

template <typename... Args>
void logf(LogLevel level, Args&&... args) {
  if (!log_enabled(level)) return;
  std::ostringstream os;
  (os << ... << args);
  log_write(level, os.str());
}

}  // namespace beamsweep

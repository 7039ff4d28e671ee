#include "circleflow/log.hpp"

#include <cstdlib>
#include <iostream>

namespace circleflow {

static LogLevel parse_level() {
  const char* v = std::getenv("CIRCLEFLOW_LOG");
  if (!v) return LogLevel::quiet;
  std::string s(v);
  if (s == "debug" || s == "2") return LogLevel::debug;
  if (s == "info" || s == "1") return LogLevel::info;
  return LogLevel::quiet;
}

LogLevel log_level() {
  static const LogLevel level = parse_level();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::info) std::cerr << "[circleflow] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::debug) std::cerr << "[circleflow:debug] " << msg << "\n";
}

}  // namespace circleflow

// Stderr logging gated by the CIRCLEFLOW_LOG environment variable (quiet|info|debug).
#pragma once

#include <string>

namespace circleflow {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace circleflow

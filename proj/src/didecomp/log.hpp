#pragma once

#include <functional>
#include <string_view>

namespace didecomp {

enum class LogLevel { Info, Warning };

using LogSink = std::function<void(LogLevel, std::string_view)>;

/// Replaces the process-wide sink (default: stderr). Returns the previous one.
LogSink set_log_sink(LogSink sink);

void log_message(LogLevel level, std::string_view message);
inline void log_warning(std::string_view message) { log_message(LogLevel::Warning, message); }
inline void log_info(std::string_view message) { log_message(LogLevel::Info, message); }

}  // namespace didecomp

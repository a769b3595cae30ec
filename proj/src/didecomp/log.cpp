#include "didecomp/log.hpp"

#include <iostream>
#include <mutex>

namespace didecomp {

namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

LogSink& current_sink() {
    static LogSink sink = [](LogLevel level, std::string_view message) {
        std::clog << (level == LogLevel::Warning ? "warning: " : "") << message << '\n';
    };
    return sink;
}

}  // namespace

LogSink set_log_sink(LogSink sink) {
    std::lock_guard lock(sink_mutex());
    auto previous = std::move(current_sink());
    current_sink() = std::move(sink);
    return previous;
}

void log_message(LogLevel level, std::string_view message) {
    std::lock_guard lock(sink_mutex());
    if (current_sink()) current_sink()(level, message);
}

}  // namespace didecomp

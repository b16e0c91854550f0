#ifndef FASRIS_LOG_HPP
#define FASRIS_LOG_HPP

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace fasris {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

// FASRIS_LOG in {error, info, debug}; default error
inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("FASRIS_LOG");
        if (env == nullptr) return LogLevel::Error;
        if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
        if (std::strcmp(env, "info") == 0) return LogLevel::Info;
        return LogLevel::Error;
    }();
    return level;
}

inline void log_at(LogLevel level, const char* fmt, ...) {
    if (static_cast<int>(level) > static_cast<int>(log_level())) return;
    va_list args;
    va_start(args, fmt);
    std::vfprintf(stderr, fmt, args);
    std::fputc('\n', stderr);
    va_end(args);
}

#define FASRIS_LOG_INFO(...) ::fasris::log_at(::fasris::LogLevel::Info, __VA_ARGS__)
#define FASRIS_LOG_DEBUG(...) ::fasris::log_at(::fasris::LogLevel::Debug, __VA_ARGS__)
#define FASRIS_LOG_ERROR(...) ::fasris::log_at(::fasris::LogLevel::Error, __VA_ARGS__)

}  // namespace fasris

#endif

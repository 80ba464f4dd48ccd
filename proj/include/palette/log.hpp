#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

// Minimal stderr logger. Level comes from the PALETTE_LOG environment
// variable: error, warn (default), info, debug.

namespace palette::logging {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

inline Level level() {
    static Level lv = [] {
        const char* env = std::getenv("PALETTE_LOG");
        if (!env) return Level::warn;
        if (std::strcmp(env, "error") == 0) return Level::error;
        if (std::strcmp(env, "info") == 0) return Level::info;
        if (std::strcmp(env, "debug") == 0) return Level::debug;
        return Level::warn;
    }();
    return lv;
}

inline void emit(Level lv, const char* tag, const std::string& msg) {
    if (lv <= level()) {
        std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
    }
}

inline void error(const std::string& msg) { emit(Level::error, "error", msg); }
inline void warn(const std::string& msg) { emit(Level::warn, "warn", msg); }
inline void info(const std::string& msg) { emit(Level::info, "info", msg); }
inline void debug(const std::string& msg) { emit(Level::debug, "debug", msg); }

}  // namespace palette::logging

#pragma once

// Tiny leveled logger; verbosity via the DOGFIT_LOG env var (0..2, default 1).

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

namespace dogfit {

inline int log_level() {
    static const int level = [] {
        const char* env = std::getenv("DOGFIT_LOG");
        if (!env) return 1;
        return std::atoi(env);
    }();
    return level;
}

inline void log_msg(int level, const std::string& msg) {
    if (level <= log_level()) std::cerr << "[dogfit] " << msg << "\n";
}

}  // namespace dogfit

#define DOGFIT_LOG(level, expr)                   \
    do {                                          \
        if ((level) <= ::dogfit::log_level()) {   \
            std::ostringstream oss_;              \
            oss_ << expr;                         \
            ::dogfit::log_msg((level), oss_.str()); \
        }                                         \
    } while (0)

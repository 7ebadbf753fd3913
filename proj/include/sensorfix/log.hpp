#pragma once

#include <cstdio>
#include <string>

namespace sensorfix::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Global threshold, initialized from the SENSORFIX_LOG env var on first use.
Level threshold();
void set_threshold(Level lv);

void write(Level lv, const std::string& msg);

inline void error(const std::string& msg) { write(Level::error, msg); }
inline void warn(const std::string& msg) { write(Level::warn, msg); }
inline void info(const std::string& msg) { write(Level::info, msg); }
inline void debug(const std::string& msg) { write(Level::debug, msg); }

} // namespace sensorfix::log

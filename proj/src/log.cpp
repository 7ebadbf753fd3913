#include "sensorfix/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace sensorfix::log {

namespace {

Level parse_env() {
    const char* v = std::getenv("SENSORFIX_LOG");
    if (!v) return Level::warn;
    if (!std::strcmp(v, "error") || !std::strcmp(v, "0")) return Level::error;
    if (!std::strcmp(v, "warn") || !std::strcmp(v, "1")) return Level::warn;
    if (!std::strcmp(v, "info") || !std::strcmp(v, "2")) return Level::info;
    if (!std::strcmp(v, "debug") || !std::strcmp(v, "3")) return Level::debug;
    return Level::warn;
}

std::atomic<Level> g_threshold{parse_env()};
std::mutex g_write_mutex;

const char* tag(Level lv) {
    switch (lv) {
        case Level::error: return "error";
        case Level::warn: return "warn";
        case Level::info: return "info";
        case Level::debug: return "debug";
    }
    return "?";
}

} // namespace

Level threshold() { return g_threshold.load(std::memory_order_relaxed); }

void set_threshold(Level lv) { g_threshold.store(lv, std::memory_order_relaxed); }

void write(Level lv, const std::string& msg) {
    if (lv > threshold()) return;
    std::lock_guard<std::mutex> lock(g_write_mutex);
    std::fprintf(stderr, "[%s] %s\n", tag(lv), msg.c_str());
}

} // namespace sensorfix::log

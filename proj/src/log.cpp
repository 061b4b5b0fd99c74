#include "mgtdetect/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace mgtdetect::log {

namespace {
std::atomic<Level> g_level{Level::warn};
std::atomic<long> g_warnings{0};
std::mutex g_mutex;

const char* tag(Level l) {
    switch (l) {
        case Level::debug: return "debug";
        case Level::info: return "info";
        case Level::warn: return "warning";
        case Level::error: return "error";
    }
    return "?";
}
}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

void write(Level l, std::string_view message) {
    if (l == Level::warn) ++g_warnings;
    if (l < g_level.load()) return;
    std::lock_guard lock(g_mutex);
    std::cerr << "[mgtdetect " << tag(l) << "] " << message << '\n';
}

long warning_count() { return g_warnings.load(); }

}  // namespace mgtdetect::log

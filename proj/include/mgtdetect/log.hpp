#pragma once

#include <string_view>

namespace mgtdetect::log {

enum class Level { debug, info, warn, error };

void set_level(Level level);
Level level();

void write(Level level, std::string_view message);

inline void info(std::string_view m) { write(Level::info, m); }
inline void warn(std::string_view m) { write(Level::warn, m); }
inline void debug(std::string_view m) { write(Level::debug, m); }

// Number of warnings emitted since process start (used by validation tests).
long warning_count();

}  // namespace mgtdetect::log

#pragma once

#include <string>

namespace phoenix::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

void set_level(Level level);
Level level();

// Parses "debug" / "info" / "warn" / "error" / "off"; returns false on
// unknown names.
bool set_level_by_name(const std::string& name);

void write(Level level, const std::string& message);

inline void debug(const std::string& msg) { write(Level::Debug, msg); }
inline void info(const std::string& msg) { write(Level::Info, msg); }
inline void warn(const std::string& msg) { write(Level::Warn, msg); }
inline void error(const std::string& msg) { write(Level::Error, msg); }

}  // namespace phoenix::log

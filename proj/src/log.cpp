#include "phoenix/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace phoenix::log {

namespace {
std::atomic<Level> g_level{Level::Warn};
std::mutex g_mutex;

const char* tag(Level level) {
  switch (level) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
    default: return "?";
  }
}
}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

bool set_level_by_name(const std::string& name) {
  if (name == "debug") set_level(Level::Debug);
  else if (name == "info") set_level(Level::Info);
  else if (name == "warn") set_level(Level::Warn);
  else if (name == "error") set_level(Level::Error);
  else if (name == "off") set_level(Level::Off);
  else return false;
  return true;
}

void write(Level level, const std::string& message) {
  if (level < g_level.load()) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::fprintf(stderr, "[%s] %s\n", tag(level), message.c_str());
}

}  // namespace phoenix::log

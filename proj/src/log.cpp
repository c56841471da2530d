#include "uls/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace uls {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("ULS_BENCH_LOG");
    if (!env) return LogLevel::Info;
    const std::string s(env);
    if (s == "error") return LogLevel::Error;
    if (s == "warn") return LogLevel::Warn;
    if (s == "debug") return LogLevel::Debug;
    return LogLevel::Info;
  }();
  return level;
}

void log_message(LogLevel level, const std::string& msg) {
  if (int(level) > int(log_level())) return;
  static std::mutex mu;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "[" << names[int(level)] << "] " << msg << "\n";
}

}  // namespace uls

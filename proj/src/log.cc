#include "oats/log.h"

#include <cstdlib>
#include <memory>
#include <string_view>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace oats {

namespace {

spdlog::logger &Logger() {
  static std::shared_ptr<spdlog::logger> logger = [] {
    auto l = spdlog::stderr_logger_mt("oats");
    l->set_pattern("[%l] %v");
    const char *env = std::getenv("OATS_LOG");
    const std::string_view level = env ? env : "info";
    if (level == "error") {
      l->set_level(spdlog::level::err);
    } else if (level == "warn") {
      l->set_level(spdlog::level::warn);
    } else if (level == "debug") {
      l->set_level(spdlog::level::debug);
    } else {
      l->set_level(spdlog::level::info);
    }
    return l;
  }();
  return *logger;
}

}  // namespace

void LogError(const std::string &message) { Logger().error(message); }
void LogWarn(const std::string &message) { Logger().warn(message); }
void LogInfo(const std::string &message) { Logger().info(message); }
void LogDebug(const std::string &message) { Logger().debug(message); }

}  // namespace oats

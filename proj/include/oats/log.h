#pragma once

#include <string>

namespace oats {

// Logging goes to stderr. The level is read once from OATS_LOG
// (error, warn, info, debug); the default is info.
void LogError(const std::string &message);
void LogWarn(const std::string &message);
void LogInfo(const std::string &message);
void LogDebug(const std::string &message);

}  // namespace oats

// SPDX-License-Identifier: Apache-2.0
#include "b2dr/common/log.hpp"

#include <spdlog/sinks/stdout_sinks.h>

#include <cstdlib>
#include <string_view>

namespace b2dr {

void configure_logging_from_env() {
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("B2DR_LOG")) {
    const std::string_view v(env);
    if (v == "debug") level = spdlog::level::debug;
    else if (v == "info") level = spdlog::level::info;
    else if (v == "warn") level = spdlog::level::warn;
  }
  // stdout is reserved for command results.
  static auto logger = spdlog::stderr_logger_mt("b2dr");
  spdlog::set_default_logger(logger);
  spdlog::set_level(level);
}

}  // namespace b2dr

#include "faultsim/log.hpp"

#include <cstdlib>
#include <spdlog/sinks/stdout_sinks.h>

namespace faultsim {

void configure_logging() {
  static bool done = false;
  if (!done) {
    spdlog::set_default_logger(spdlog::stderr_logger_st("faultsim"));
    done = true;
  }
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char *env = std::getenv("FAULTSIM_LOG")) level = spdlog::level::from_str(env);
  spdlog::set_level(level);
}

}  // namespace faultsim

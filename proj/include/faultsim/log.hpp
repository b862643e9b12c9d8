#pragma once

#include <spdlog/spdlog.h>

namespace faultsim {

// Reads FAULTSIM_LOG (trace, debug, info, warn, error, off); default warn.
void configure_logging();

}  // namespace faultsim

#pragma once

#include <string>

#include "faultsim/state.hpp"

namespace faultsim::stepper {

// Layout (all little-endian): 8-byte magic "FSCKPT01"; u64 n_dofs; u64 n_state;
// i64 step; f64 t; f64 tau_prev; f64[n_dofs] u, ud, udd; f64[n_state] alpha.
void write_checkpoint(const SystemState &s, const std::string &path);
SystemState read_checkpoint(const std::string &path);

}  // namespace faultsim::stepper

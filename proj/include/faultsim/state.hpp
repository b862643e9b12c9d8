#pragma once

#include <vector>

namespace faultsim::stepper {

struct LoadingProfile {
  double v_D = 2e-4;  // m/s
  double T0 = 60.0;   // s
  bool smooth_ramp = false;

  double xi(double t) const;
};

// Coefficient vectors hold two entries per vertex of the finest level
// (Dirichlet vertices included); alpha holds one value per non-mortar fault
// node, faults concatenated.
struct SystemState {
  double t = 0.0;
  double tau_prev = 0.0;
  long step = 0;
  std::vector<double> u, ud, udd;
  std::vector<double> alpha;
};

}  // namespace faultsim::stepper

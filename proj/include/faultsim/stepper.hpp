#pragma once

#include <functional>
#include <span>
#include <vector>

#include "faultsim/fixed_point.hpp"
#include "faultsim/model.hpp"
#include "faultsim/state.hpp"

namespace faultsim::stepper {

// Trapezoidal Newmark: given the new velocity, returns u_n and the new acceleration.
void newmark_update(std::span<const double> ud_new, const SystemState &prev, double tau,
                    std::vector<double> &u, std::vector<double> &udd);

// One geometric fixed-point step of the stationary problem on the constrained
// space built from u = 0.  Floating bodies (tangential rigid motions) are
// regularised with a tiny mass shift.
std::vector<double> initial_displacement(const Model &model);
std::vector<double> initial_acceleration(const Model &model, const std::vector<double> &u0);
SystemState initial_state(const Model &model);

// 1/2 ud'M ud + 1/2 u'B u - l'u over full dofs.
long double discrete_energy(const Model &model, const SystemState &s);

struct AdaptiveOptions {
  double delta_tau = 1e-5;
  double tau_min = 1e-9;
  double t_end = 60.0;
};

struct AdaptiveResult {
  std::vector<solver::StepResult> steps;  // committed, in time order
  int solves = 0;                         // step solves spent, trials included
};

// The step-doubling protocol on an arbitrary step function.
// solve(state, tau) -> StepResult, agree(two_half, full) -> bool.
using SolveFn = std::function<solver::StepResult(const SystemState &, double)>;
using AgreeFn = std::function<bool(const solver::StepResult &, const solver::StepResult &)>;
AdaptiveResult step_doubling(const SystemState &cur, double tau_guess, const AdaptiveOptions &ad,
                             const SolveFn &solve, const AgreeFn &agree);

// Step-doubling control on the state: tau is doubled while a 2tau step and two
// tau steps agree to delta_tau, halved until they do; the two tau steps are
// committed.
class AdaptiveStepper {
 public:
  AdaptiveStepper(const Model &model, solver::StepOptions opt, AdaptiveOptions ad);
  AdaptiveResult advance(const SystemState &state);
  solver::StepSolver &solver() { return solver_; }

 private:
  bool agree(const solver::StepResult &two_half, const solver::StepResult &full) const;

  const Model &model_;
  solver::StepSolver solver_;
  AdaptiveOptions ad_;
};

}  // namespace faultsim::stepper

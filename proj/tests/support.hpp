#pragma once

#include <random>

#include "faultsim/config.hpp"
#include "faultsim/fixed_point.hpp"
#include "faultsim/model.hpp"
#include "faultsim/stepper.hpp"

namespace faultsim::testing {

inline ModelSpec spring_slider_spec(int levels) {
  auto c = scenario::preset("spring_slider");
  c.mesh.max_levels = levels;
  return scenario::model_spec(c);
}

// A rate problem from a perturbed state: random alpha in [-12, -6], random
// velocities (hence random l_n) and a random step size.  The returned problem
// points into the solver; use it before building the next one.
struct RandomRate {
  solver::RateProblem pb;
  std::vector<double> x0;
  double tau = 0.0;
};

inline RandomRate random_rate_problem(const Model &model, solver::StepSolver &ss, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> a(-12.0, -6.0), v(-1.0, 1.0), lt(-4.0, -1.0);
  stepper::SystemState s = stepper::initial_state(model);
  const double vD = model.spec().loading.v_D;
  for (double &x : s.ud) x = 10 * vD * v(rng);
  for (double &x : s.alpha) x = a(rng);
  s.t = 5.0;
  RandomRate r;
  r.tau = std::pow(10.0, lt(rng));
  r.pb = ss.rate_problem(s, r.tau, s.alpha);
  r.x0 = ss.initial_iterate(s);
  return r;
}

// u'' = -u, u(0) = 1, u'(0) = 0 integrated to t = 1 by the trapezoidal
// Newmark scheme (velocity solved for, the rest from newmark_update).
inline double oscillator_error(int steps) {
  const double tau = 1.0 / steps;
  stepper::SystemState s;
  s.u = {1.0};
  s.ud = {0.0};
  s.udd = {-1.0};
  for (int n = 0; n < steps; ++n) {
    const double v = (s.ud[0] * (2.0 / tau - tau / 2.0) + s.udd[0] - s.u[0]) / (2.0 / tau + tau / 2.0);
    std::vector<double> u, udd;
    const double vn[1] = {v};
    stepper::newmark_update(vn, s, tau, u, udd);
    s.u = u;
    s.ud = {v};
    s.udd = udd;
  }
  return std::abs(s.u[0] - std::cos(1.0));
}

}  // namespace faultsim::testing

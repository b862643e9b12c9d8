#include <algorithm>
#include <cmath>

#include "faultsim/error.hpp"
#include "faultsim/solver.hpp"

namespace faultsim::solver {

void SolverConfig::validate() const {
  if (!(omega > 0 && omega <= 1)) throw ConfigError("solver: omega must lie in (0, 1]");
  if (!(fp_tol_factor > 0 && mg_tol > 0 && state_tol > 0))
    throw ConfigError("solver: tolerances must be positive");
  if (vcycles < 1 || pre_smooth < 0 || post_smooth < 0 || tnnmg_cap < 1 || fp_cap < 1)
    throw ConfigError("solver: iteration counts must be positive");
  if (!(smoother_damping > 0 && smoother_damping <= 1))
    throw ConfigError("solver: smoother damping must lie in (0, 1]");
  if (!(stiff_truncation >= 0)) throw ConfigError("solver: stiff_truncation must be >= 0");
}

double solve_state_scalar(const friction::FrictionParams &p, double alpha_prev, double V, double tau,
                          double tol) {
  if (tau == 0.0) return alpha_prev;
  auto F = [&](double beta) {
    double dpsi;
    if (p.law == friction::StateLaw::dieterich)
      dpsi = V / p.L - std::exp(std::min(-beta, 700.0));
    else
      dpsi = friction::psi_prime(p, beta, V);
    return beta - alpha_prev + tau * dpsi;
  };
  double lo = alpha_prev - 1.0, hi = alpha_prev + 1.0;
  double width = 1.0;
  int guard = 0;
  while (F(lo) > 0) {
    width *= 2;
    lo = alpha_prev - width;
    if (++guard > 200) throw ConvergenceError("state solver: bracket expansion failed");
  }
  width = 1.0;
  while (F(hi) < 0) {
    width *= 2;
    hi = alpha_prev + width;
    if (++guard > 400) throw ConvergenceError("state solver: bracket expansion failed");
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (F(mid) > 0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace faultsim::solver

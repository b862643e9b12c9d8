#include "faultsim/friction.hpp"

#include <algorithm>
#include <cmath>

#include "faultsim/error.hpp"

namespace faultsim::friction {

void FrictionParams::validate() const {
  if (!(V0 > 0 && mu0 > 0 && a > 0 && b > 0 && L > 0))
    throw ConfigError("friction: V0, mu0, a, b, L must be positive");
  if (!(sigma_n >= 0)) throw ConfigError("friction: sigma_n must be nonnegative");
}

double mu_star(const FrictionParams &p, double V, double theta) {
  if (!(V > 0) || !(theta > 0)) throw DomainError("mu_star: V and theta must be positive");
  return p.mu0 + p.a * std::log(V / p.V0) + p.b * std::log(p.V0 * theta / p.L);
}

double log_v_m(const FrictionParams &p, double alpha) {
  double e = -(p.mu0 + p.b * (std::log(p.V0 / p.L) + alpha)) / p.a;
  return std::log(p.V0) + std::clamp(e, -700.0, 700.0);
}

double v_m(const FrictionParams &p, double alpha) { return std::exp(log_v_m(p, alpha)); }

double RatePotential::vm() const { return std::exp(log_vm); }

double RatePotential::value(double V) const {
  if (k == 0.0) return 0.0;
  double lr = std::log(V) - log_vm;
  if (!(lr > 0)) return 0.0;
  return k * (V * lr - V + vm());
}

double RatePotential::derivative(double V) const {
  if (k == 0.0) return 0.0;
  double lr = std::log(V) - log_vm;
  return lr > 0 ? k * lr : 0.0;
}

double RatePotential::second(double V) const {
  if (k == 0.0) return 0.0;
  return std::log(V) - log_vm > 0 ? k / V : 0.0;
}

RatePotential potential(const FrictionParams &p, double alpha, double weight) {
  return {weight * p.a * p.sigma_n, log_v_m(p, alpha)};
}

double phi(const FrictionParams &p, Vec2 v, double alpha) {
  return potential(p, alpha).value(norm(v));
}

Vec2 phi_grad(const FrictionParams &p, Vec2 v, double alpha) {
  double V = norm(v);
  double d = potential(p, alpha).derivative(V);
  if (d == 0.0) return {0.0, 0.0};
  return (d / V) * v;
}

double phi_second(const FrictionParams &p, double V, double alpha) {
  return potential(p, alpha).second(V);
}

double psi(const FrictionParams &p, double alpha, double V) {
  if (p.law == StateLaw::dieterich) return V / p.L * alpha + std::exp(-alpha);
  if (V <= 0) return 0.0;
  double r = V / p.L;
  return r * (0.5 * alpha * alpha + std::log(r) * alpha);
}

double psi_prime(const FrictionParams &p, double alpha, double V) {
  if (p.law == StateLaw::dieterich) return V / p.L - std::exp(-alpha);
  if (V <= 0) return 0.0;
  double r = V / p.L;
  return r * (alpha + std::log(r));
}

double nodal_rate_functional(const FrictionParams &p, std::span<const Vec2> jumps,
                             std::span<const double> alpha, std::span<const double> weights) {
  double s = 0.0;
  for (std::size_t i = 0; i < jumps.size(); ++i) s += weights[i] * phi(p, jumps[i], alpha[i]);
  return s;
}

}  // namespace faultsim::friction

#pragma once

#include <span>
#include <vector>

#include "faultsim/geometry.hpp"

namespace faultsim::friction {

enum class StateLaw { dieterich, ruina };

struct FrictionParams {
  double V0 = 1e-6;    // m/s
  double mu0 = 0.6;
  double a = 0.010;
  double b = 0.015;
  double L = 1e-5;     // m
  double sigma_n = 0;  // Pa, frozen normal stress magnitude
  StateLaw law = StateLaw::dieterich;

  void validate() const;
};

double mu_star(const FrictionParams &p, double V, double theta);
// log(V_m(alpha)); the exponent is clamped to +-700.
double log_v_m(const FrictionParams &p, double alpha);
double v_m(const FrictionParams &p, double alpha);

// Scalar rate potential g(V) = a*sigma*(V log(V/V_m) - V + V_m) for V >= V_m,
// zero below; the vector form is phi(v) = g(|v|).
struct RatePotential {
  double k;      // a * sigma_n (times a nodal weight when used nodally)
  double log_vm;

  double value(double V) const;
  double derivative(double V) const;  // g'(V), zero for V <= V_m
  double second(double V) const;      // g''(V) = k / V outside, zero inside
  double vm() const;
};

RatePotential potential(const FrictionParams &p, double alpha, double weight = 1.0);

double phi(const FrictionParams &p, Vec2 v, double alpha);
Vec2 phi_grad(const FrictionParams &p, Vec2 v, double alpha);
double phi_second(const FrictionParams &p, double V, double alpha);

double psi(const FrictionParams &p, double alpha, double V);
double psi_prime(const FrictionParams &p, double alpha, double V);

double nodal_rate_functional(const FrictionParams &p, std::span<const Vec2> jumps,
                             std::span<const double> alpha, std::span<const double> weights);

}  // namespace faultsim::friction

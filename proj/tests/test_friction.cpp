#include <doctest.h>

#include <cmath>
#include <random>

#include "faultsim/error.hpp"
#include "faultsim/friction.hpp"
#include "faultsim/solver.hpp"

using namespace faultsim;
using namespace faultsim::friction;

namespace {

FrictionParams table_params() {
  FrictionParams p;
  p.sigma_n = 4.905e4;
  return p;
}

}  // namespace

TEST_CASE("friction coefficient at reference values") {
  auto p = table_params();
  CHECK(mu_star(p, 1e-6, 10.0) == 0.6);
  CHECK(mu_star(p, std::exp(1.0) * 1e-6, 10.0) == doctest::Approx(0.610).epsilon(1e-14));
  CHECK(mu_star(p, 1e-6, 10.0 * std::exp(1.0)) == doctest::Approx(0.615).epsilon(1e-14));
  CHECK_THROWS_AS(mu_star(p, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(mu_star(p, 1e-6, -1.0), DomainError);
}

TEST_CASE("regularisation velocity") {
  auto p = table_params();
  CHECK(v_m(p, std::log(10.0)) == doctest::Approx(1e-6 * std::exp(-60.0)).epsilon(1e-12));
  CHECK(v_m(p, std::log(10.0)) == doctest::Approx(8.757e-33).epsilon(1e-3));

  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-20, 5);
  for (int i = 0; i < 1000; ++i) {
    double alpha = u(rng);
    CHECK(std::abs(mu_star(p, v_m(p, alpha), std::exp(alpha))) <= 1e-10);
  }
  double prev = v_m(p, -30.0);
  for (double alpha = -29.5; alpha <= 30; alpha += 0.5) {
    double v = v_m(p, alpha);
    CHECK(v < prev);
    prev = v;
  }
  // clamped exponent stays finite
  CHECK(std::isfinite(log_v_m(p, 1e6)));
  CHECK(std::isfinite(log_v_m(p, -1e6)));
}

TEST_CASE("rate functional values at the threshold") {
  auto p = table_params();
  const double alpha = std::log(10.0);
  const double vm = v_m(p, alpha);
  CHECK(std::abs(phi(p, {vm, 0}, alpha)) <= 1e-40);
  CHECK(norm(phi_grad(p, {vm, 0}, alpha)) == 0.0);
  CHECK(phi(p, {0, 0}, alpha) == 0.0);
  CHECK(norm(phi_grad(p, {0, 0}, alpha)) == 0.0);
  CHECK(phi(p, {0.5 * vm, 0}, alpha) == 0.0);
  CHECK(phi_second(p, 0.5 * vm, alpha) == 0.0);
  CHECK(phi_second(p, 1e-3, alpha) == doctest::Approx(p.a * p.sigma_n / 1e-3));
}

TEST_CASE("rate functional gradient against central differences") {
  auto p = table_params();
  const double alpha = std::log(10.0);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> lg(std::log(1e-8), std::log(1e-2)), ang(0, 2 * M_PI);
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    const double V = std::exp(lg(rng)), th = ang(rng);
    const Vec2 v{V * std::cos(th), V * std::sin(th)};
    const double h = 1e-7 * V;
    const Vec2 g = phi_grad(p, v, alpha);
    const double gx = (phi(p, {v.x + h, v.y}, alpha) - phi(p, {v.x - h, v.y}, alpha)) / (2 * h);
    const double gy = (phi(p, {v.x, v.y + h}, alpha) - phi(p, {v.x, v.y - h}, alpha)) / (2 * h);
    worst = std::max(worst, norm(Vec2{gx, gy} - g) / norm(g));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("gradient is sigma times mu along the slip direction") {
  auto p = table_params();
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> lg(std::log(1e-8), std::log(1e-2)), a(-5, 5), ang(0, 2 * M_PI);
  for (int i = 0; i < 1000; ++i) {
    const double V = std::exp(lg(rng)), alpha = a(rng), th = ang(rng);
    if (V <= v_m(p, alpha)) continue;
    const Vec2 v{V * std::cos(th), V * std::sin(th)};
    const Vec2 g = phi_grad(p, v, alpha);
    const Vec2 expect = (p.sigma_n * mu_star(p, V, std::exp(alpha)) / V) * v;
    CHECK(norm(g - expect) <= 1e-10 * norm(expect));
  }
}

TEST_CASE("rate functional is convex and nonnegative") {
  auto p = table_params();
  const double alpha = std::log(10.0);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1e-3, 1e-3), l(0, 1);
  for (int i = 0; i < 10000; ++i) {
    Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    double t = l(rng);
    double lhs = phi(p, t * a + (1 - t) * b, alpha);
    double rhs = t * phi(p, a, alpha) + (1 - t) * phi(p, b, alpha);
    CHECK(lhs <= rhs + 1e-12 * std::max(1.0, rhs));
    CHECK(phi(p, a, alpha) >= 0.0);
  }
}

TEST_CASE("state functionals") {
  auto p = table_params();
  CHECK(std::abs(psi_prime(p, std::log(10.0), 1e-6)) <= 1e-12);
  for (double a = -10; a <= 10; a += 0.5) CHECK(psi_prime(p, a, 0.0) < 0.0);

  FrictionParams r = p;
  r.law = StateLaw::ruina;
  CHECK(std::abs(psi_prime(r, std::log(10.0), 1e-6)) <= 1e-12);
  CHECK(psi(r, 3.0, 0.0) == 0.0);

  // convexity in alpha by second differences
  for (const auto &q : {p, r})
    for (double a = -8; a <= 8; a += 0.25) {
      const double h = 1e-3, V = 1e-5;
      double d2 = psi(q, a + h, V) - 2 * psi(q, a, V) + psi(q, a - h, V);
      CHECK(d2 >= -1e-12);
      // psi' is the derivative of psi
      double fd = (psi(q, a + h, V) - psi(q, a - h, V)) / (2 * h);
      CHECK(fd == doctest::Approx(psi_prime(q, a, V)).epsilon(1e-6));
    }
}

TEST_CASE("nodal rate functional") {
  auto p = table_params();
  std::vector<Vec2> zero(3, Vec2{0, 0});
  std::vector<double> alpha(3, 0.0), w(3, 1.0);
  CHECK(nodal_rate_functional(p, zero, alpha, w) == 0.0);

  std::vector<Vec2> one{{1e-4, 0}};
  std::vector<double> a1{0.3}, w2{2.0};
  CHECK(nodal_rate_functional(p, one, a1, w2) == doctest::Approx(2 * phi(p, one[0], 0.3)));

  // uniform jump on a uniform 5 m fault with 11 nodes: weights sum to the length
  std::vector<Vec2> jumps(11, Vec2{3e-4, 1e-4});
  std::vector<double> al(11, -1.0), wt(11, 0.5);
  wt.front() = wt.back() = 0.25;
  CHECK(nodal_rate_functional(p, jumps, al, wt) == doctest::Approx(5.0 * phi(p, jumps[0], -1.0)));
}

TEST_CASE("scalar state solve") {
  auto p = table_params();
  CHECK(solver::solve_state_scalar(p, 0.0, 0.0, 1.0) == doctest::Approx(0.5671432904).epsilon(1e-10));
  CHECK(std::abs(solver::solve_state_scalar(p, 0.0, 0.0, 1.0) - 0.5671432904) <= 1e-9);
  CHECK(solver::solve_state_scalar(p, -3.0, 1e-3, 0.0) == -3.0);

  for (auto law : {StateLaw::dieterich, StateLaw::ruina}) {
    p.law = law;
    const double V = 1e-6, target = std::log(p.L / V);
    double a = -10.0;
    for (int n = 0; n < 1000; ++n) {
      double next = solver::solve_state_scalar(p, a, V, 1.0);
      // implicit Euler stays between the previous value and the fixed point
      CHECK(next >= std::min(a, target) - 1e-12);
      CHECK(next <= std::max(a, target) + 1e-12);
      a = next;
    }
    CHECK(std::abs(a - target) <= 1e-8);
  }
}

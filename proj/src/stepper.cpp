#include "faultsim/stepper.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "faultsim/error.hpp"

namespace faultsim::stepper {

void newmark_update(std::span<const double> ud_new, const SystemState &prev, double tau,
                    std::vector<double> &u, std::vector<double> &udd) {
  const std::size_t n = ud_new.size();
  u.resize(n);
  udd.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    udd[i] = (2.0 / tau) * (ud_new[i] - prev.ud[i]) - prev.udd[i];
    u[i] = prev.u[i] + 0.5 * tau * (ud_new[i] + prev.ud[i]);
  }
}

namespace {

Eigen::SparseMatrix<double> to_eigen(const CsrMatrix &a) {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < a.rows; ++i)
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) t.emplace_back(i, a.col[k], a.val[k]);
  Eigen::SparseMatrix<double> m(a.rows, a.cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

std::vector<double> free_part(const Model &model, const std::vector<double> &full) {
  const auto &d = model.dofs();
  std::vector<double> out(2 * d.num_free());
  for (int fv = 0; fv < d.num_free(); ++fv)
    for (int c = 0; c < 2; ++c) out[2 * fv + c] = full[2 * d.free_vertices[fv] + c];
  return out;
}

std::vector<double> to_full(const Model &model, const std::vector<double> &free) {
  const auto &d = model.dofs();
  std::vector<double> out(model.num_full(), 0.0);
  for (int fv = 0; fv < d.num_free(); ++fv)
    for (int c = 0; c < 2; ++c) out[2 * d.free_vertices[fv] + c] = free[2 * fv + c];
  return out;
}

}  // namespace

std::vector<double> initial_displacement(const Model &model) {
  std::vector<double> zero(model.num_full(), 0.0);
  auto coupling = mortar::build_coupling(model.faults(), model.positions(), zero, model.dofs());
  const auto &T = coupling.transform;
  auto Bf = fem::FreeBlock::build(model.elasticity(), model.dofs());
  auto Mf = fem::FreeBlock::build(model.mass(), model.dofs());
  TripleProduct plan(T.to_nodal, Bf.matrix);
  CsrMatrix Bs, Ms;
  plan.compute(T.to_nodal, Bf.matrix, {}, Bs);
  TripleProduct mplan(T.to_nodal, Mf.matrix);
  mplan.compute(T.to_nodal, Mf.matrix, {}, Ms);

  std::vector<double> rhs = solver::tmul(T.to_nodal, free_part(model, model.load()));
  Eigen::Map<const Eigen::VectorXd> r(rhs.data(), static_cast<Eigen::Index>(rhs.size()));

  Eigen::SparseMatrix<double> K = to_eigen(Bs);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  bool singular = ldlt.info() != Eigen::Success;
  if (!singular) {
    const auto D = ldlt.vectorD();
    singular = D.cwiseAbs().minCoeff() <= 1e-10 * D.cwiseAbs().maxCoeff();
  }
  Eigen::VectorXd x;
  if (!singular) {
    x = ldlt.solve(r);
  } else {
    double kmax = 0, mmax = 0;
    for (double v : Bs.val) kmax = std::max(kmax, std::abs(v));
    for (double v : Ms.val) mmax = std::max(mmax, std::abs(v));
    Eigen::SparseMatrix<double> Kr = K + (1e-10 * kmax / mmax) * to_eigen(Ms);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> reg(Kr);
    if (reg.info() != Eigen::Success) throw StepFailureError("initial displacement: factorisation failed");
    x = reg.solve(r);
  }
  std::vector<double> xs(x.data(), x.data() + x.size());
  return to_full(model, T.apply(xs));
}

std::vector<double> initial_acceleration(const Model &model, const std::vector<double> &u0) {
  std::vector<double> bu(model.num_full());
  spmv(model.elasticity(), u0, bu);
  std::vector<double> rhs(model.num_full());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = model.load()[i] - bu[i];
  auto Mf = fem::FreeBlock::build(model.mass(), model.dofs());
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(to_eigen(Mf.matrix));
  if (llt.info() != Eigen::Success) throw StepFailureError("initial acceleration: mass factorisation failed");
  std::vector<double> rf = free_part(model, rhs);
  Eigen::Map<const Eigen::VectorXd> r(rf.data(), static_cast<Eigen::Index>(rf.size()));
  Eigen::VectorXd a = llt.solve(r);
  return to_full(model, std::vector<double>(a.data(), a.data() + a.size()));
}

SystemState initial_state(const Model &model) {
  SystemState s;
  s.t = 0.0;
  s.tau_prev = 1e-4 * model.spec().loading.T0;
  s.u = initial_displacement(model);
  s.ud.assign(model.num_full(), 0.0);
  s.udd = initial_acceleration(model, s.u);
  s.alpha.assign(model.state_size(), model.spec().alpha0);
  return s;
}

long double discrete_energy(const Model &model, const SystemState &s) {
  long double e = 0.5L * bilinear(model.mass(), s.ud, s.ud) + 0.5L * bilinear(model.elasticity(), s.u, s.u);
  for (std::size_t i = 0; i < s.u.size(); ++i) e -= static_cast<long double>(model.load()[i]) * s.u[i];
  return e;
}

AdaptiveStepper::AdaptiveStepper(const Model &model, solver::StepOptions opt, AdaptiveOptions ad)
    : model_(model), solver_(model, opt), ad_(ad) {
  if (!(ad_.delta_tau > 0)) throw ConfigError("delta_tau must be positive");
}

bool AdaptiveStepper::agree(const solver::StepResult &two_half, const solver::StepResult &full) const {
  if (!two_half.report.ok || !full.report.ok) return false;
  return model_.state_norm(two_half.state.alpha, full.state.alpha) <= ad_.delta_tau;
}

AdaptiveResult step_doubling(const SystemState &cur, double tau_guess, const AdaptiveOptions &ad,
                             const SolveFn &solve_fn, const AgreeFn &agree) {
  AdaptiveResult out;
  const double remaining = ad.t_end - cur.t;
  if (!(remaining > 0)) return out;
  const double eps = 1e-12 * std::max(1.0, ad.t_end);
  auto fits = [&](double tau) { return cur.t + 2.0 * tau <= ad.t_end + eps; };
  auto solve = [&](const SystemState &s, double tau) {
    ++out.solves;
    return solve_fn(s, tau);
  };

  double tau = std::min(tau_guess, 0.5 * remaining);
  solver::StepResult r1 = solve(cur, tau);
  solver::StepResult r2;
  if (r1.report.ok) r2 = solve(r1.state, tau);
  solver::StepResult c = solve(cur, 2.0 * tau);

  if (r1.report.ok && agree(r2, c)) {
    while (fits(2.0 * tau)) {
      solver::StepResult r2n = solve(c.state, 2.0 * tau);
      solver::StepResult cn = solve(cur, 4.0 * tau);
      if (!agree(r2n, cn)) break;
      tau *= 2.0;
      r1 = std::move(c);
      r2 = std::move(r2n);
      c = std::move(cn);
    }
  } else {
    for (;;) {
      tau *= 0.5;
      if (tau < ad.tau_min)
        throw StepFailureError("time step underflow at t = " + std::to_string(cur.t) + ": " +
                               (r1.report.ok ? std::string("state criterion") : r1.report.failure));
      c = std::move(r1);
      r1 = solve(cur, tau);
      if (!r1.report.ok) continue;
      r2 = solve(r1.state, tau);
      if (agree(r2, c)) break;
    }
  }
  if (std::abs(r2.state.t - ad.t_end) <= eps) r2.state.t = ad.t_end;
  out.steps.push_back(std::move(r1));
  out.steps.push_back(std::move(r2));
  return out;
}

AdaptiveResult AdaptiveStepper::advance(const SystemState &cur) {
  const double guess = cur.tau_prev > 0 ? cur.tau_prev : 1e-4 * model_.spec().loading.T0;
  return step_doubling(
      cur, guess, ad_, [&](const SystemState &s, double tau) { return solver_.step(s, tau); },
      [&](const solver::StepResult &a, const solver::StepResult &b) { return agree(a, b); });
}

}  // namespace faultsim::stepper

#include "faultsim/fixed_point.hpp"

#include <algorithm>
#include <cmath>

#include "faultsim/error.hpp"
#include "faultsim/stepper.hpp"

namespace faultsim::solver {

std::vector<double> tmul(const CsrMatrix &a, std::span<const double> x) {
  std::vector<double> y(a.cols, 0.0);
  for (int i = 0; i < a.rows; ++i)
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) y[a.col[k]] += a.val[k] * x[i];
  return y;
}

StepSolver::StepSolver(const Model &model, StepOptions opt)
    : model_(model), opt_(opt), tnnmg_(opt.solver) {
  opt_.solver.validate();
  an_ = model_.mass();
  an_free_ = fem::FreeBlock::build(an_, model_.dofs());
}

void StepSolver::ensure_coupling(const std::vector<double> &u) {
  if (have_coupling_ && (!opt_.update_coupling || u == coupling_u_)) return;
  coupling_ = mortar::build_coupling(model_.faults(), model_.positions(), u, model_.dofs());
  coupling_u_ = u;
  have_coupling_ = true;

  const int K = model_.levels() - 1;
  std::vector<const CsrMatrix *> transfers;
  blocks_.clear();
  for (int k = 0; k < K; ++k) {
    std::vector<int> b;
    const int n = 2 * model_.dofs(k).num_free();
    for (int i = 0; i <= n; i += 2) b.push_back(i);
    blocks_.push_back(std::move(b));
  }
  blocks_.push_back(coupling_.transform.block_start);
  if (K > 0) {
    Q_ = multiply(coupling_.transform.to_sep, model_.prolongation(K));
    for (int k = 1; k < K; ++k) transfers.push_back(&model_.prolongation(k));
    transfers.push_back(&Q_);
  }
  tnnmg_.set_hierarchy(transfers, blocks_);
}

void StepSolver::assemble(const stepper::SystemState &prev, double tau) {
  ensure_coupling(prev.u);
  const auto &T = coupling_.transform;
  fem::compose_an_values(model_.mass(), model_.viscosity(), model_.elasticity(), tau, an_);
  an_free_.update(an_);
  if (!sep_plan_.matches(T.to_nodal, an_free_.matrix))
    sep_plan_ = TripleProduct(T.to_nodal, an_free_.matrix);
  sep_plan_.compute(T.to_nodal, an_free_.matrix, {}, an_sep_, opt_.solver.exec);

  std::vector<double> ln = fem::compose_ln(model_.mass(), model_.elasticity(), model_.load(), prev.u,
                                           prev.ud, prev.udd, tau);
  wD_ = model_.dirichlet_velocity(prev.t + tau);
  std::vector<double> lift(ln.size());
  spmv(an_, wD_, lift);
  const auto &dofs = model_.dofs();
  std::vector<double> rhs(2 * dofs.num_free());
  for (int fv = 0; fv < dofs.num_free(); ++fv)
    for (int c = 0; c < 2; ++c) {
      const int g = 2 * dofs.free_vertices[fv] + c;
      rhs[2 * fv + c] = ln[g] - lift[g];
    }
  b_sep_ = tmul(T.to_nodal, rhs);
}

std::vector<double> StepSolver::initial_iterate(const stepper::SystemState &prev) {
  ensure_coupling(prev.u);
  const auto &dofs = model_.dofs();
  std::vector<double> v(2 * dofs.num_free());
  for (int fv = 0; fv < dofs.num_free(); ++fv)
    for (int c = 0; c < 2; ++c) v[2 * fv + c] = prev.ud[2 * dofs.free_vertices[fv] + c];
  return coupling_.transform.apply_inverse(v);
}

void StepSolver::set_contacts(RateProblem &pb, const std::vector<double> &alpha) const {
  const auto &T = coupling_.transform;
  pb.contacts.resize(T.contacts.size());
  for (std::size_t k = 0; k < T.contacts.size(); ++k) {
    const auto &c = T.contacts[k];
    const double a = alpha[model_.state_offset(c.fault) + c.node];
    pb.contacts[k] = {c.sep, friction::potential(model_.friction(c.fault), a, c.weight)};
  }
}

RateProblem StepSolver::rate_problem(const stepper::SystemState &prev, double tau,
                                     const std::vector<double> &alpha) {
  assemble(prev, tau);
  RateProblem pb;
  pb.A = &an_sep_;
  pb.b = b_sep_;
  pb.block_start = coupling_.transform.block_start;
  set_contacts(pb, alpha);
  pb.prepare();
  return pb;
}

StepResult StepSolver::step(const stepper::SystemState &prev, double tau) {
  StepResult res;
  StepReport &rep = res.report;
  rep.tau = tau;
  const SolverConfig &cfg = opt_.solver;

  RateProblem pb = rate_problem(prev, tau, prev.alpha);
  std::vector<double> x = initial_iterate(prev);
  const auto &T = coupling_.transform;
  const double tol = cfg.fp_tol_factor * opt_.delta_tau;

  std::vector<double> a_cur = prev.alpha, a_new(prev.alpha.size()), a_rel(prev.alpha.size());
  bool converged = false;
  int rising = 0;
  for (int nu = 0; nu < cfg.fp_cap; ++nu) {
    a_new = prev.alpha;
    for (std::size_t k = 0; k < T.contacts.size(); ++k) {
      const auto &c = T.contacts[k];
      const int idx = model_.state_offset(c.fault) + c.node;
      a_new[idx] = solve_state_scalar(model_.friction(c.fault), prev.alpha[idx], std::abs(x[c.sep]),
                                      tau, cfg.state_tol);
    }
    for (std::size_t i = 0; i < a_rel.size(); ++i)
      a_rel[i] = cfg.omega * a_new[i] + (1.0 - cfg.omega) * a_cur[i];
    set_contacts(pb, a_rel);

    TnnmgReport tr = tnnmg_.solve(pb, x);
    rep.mg_iters += tr.iterations;
    rep.vcycles += tr.vcycles;
    for (std::size_t i = 1; i < tr.energies.size(); ++i)
      if (tr.energies[i] > tr.energies[i - 1]) {
        ++rep.energy_violations;
        ++totals_.energy_violations;
      }
    ++totals_.tnnmg_runs;
    totals_.tnnmg_iterations += tr.iterations;
    totals_.rejected += tr.rejected;
    const bool tn_ok = tr.converged;
    if (opt_.keep_tnnmg_reports) rep.tnnmg.push_back(std::move(tr));
    rep.fp_iters = nu + 1;
    if (!tn_ok) {
      rep.failure = "TNNMG iteration cap exceeded";
      return res;
    }

    const double diff = model_.state_norm(a_new, a_cur);
    if (!rep.fp_diffs.empty() && diff >= rep.fp_diffs.back())
      rising++;
    else
      rising = 0;
    if (rising >= 3) rep.non_contraction = true;
    rep.fp_diffs.push_back(diff);
    a_cur = a_new;
    if (diff <= tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    rep.failure = "fixed-point iteration cap exceeded";
    return res;
  }

  const auto &dofs = model_.dofs();
  std::vector<double> v = T.apply(x);
  stepper::SystemState &s = res.state;
  s.t = prev.t + tau;
  s.tau_prev = tau;
  s.step = prev.step + 1;
  s.ud = wD_;
  for (int fv = 0; fv < dofs.num_free(); ++fv)
    for (int c = 0; c < 2; ++c) s.ud[2 * dofs.free_vertices[fv] + c] = v[2 * fv + c];
  stepper::newmark_update(s.ud, prev, tau, s.u, s.udd);
  s.alpha = a_cur;

  res.slip_rate.assign(prev.alpha.size(), 0.0);
  const int nfaults = static_cast<int>(model_.faults().size());
  std::vector<double> num(nfaults, 0.0), den(nfaults, 0.0);
  for (const auto &c : T.contacts) {
    const double V = std::abs(x[c.sep]);
    res.slip_rate[model_.state_offset(c.fault) + c.node] = V;
    num[c.fault] += c.weight * V;
    den[c.fault] += c.weight;
  }
  for (int f = 0; f < nfaults; ++f) rep.mean_slip_rate.push_back(den[f] > 0 ? num[f] / den[f] : 0.0);
  rep.ok = true;
  return res;
}

}  // namespace faultsim::solver

#include <algorithm>
#include <cmath>

#include "faultsim/solver.hpp"

namespace faultsim::solver {

void Tnnmg::set_hierarchy(std::vector<const CsrMatrix *> transfers,
                          std::vector<std::vector<int>> block_starts) {
  transfers_ = transfers;
  blocks_ = block_starts;
  mg_.set_hierarchy(std::move(transfers), std::move(block_starts));
}

TnnmgReport Tnnmg::solve(const RateProblem &pb, std::span<double> x) {
  const int n = pb.size();
  TnnmgReport rep;
  if (blocks_.empty()) set_hierarchy({}, {pb.block_start});

  const long double j0 = energy(pb, x);
  long double e = 0.0L;
  rep.energies.push_back(e);

  std::vector<double> prev(n), xbar(n), r(n), d(n), diff(n), h_built;
  std::vector<std::uint8_t> mask_built;
  work_ = *pb.A;
  for (int it = 1; it <= cfg_.tnnmg_cap; ++it) {
    std::copy(x.begin(), x.end(), prev.begin());

    std::copy(x.begin(), x.end(), xbar.begin());
    gs_sweep(pb, xbar, cfg_.scalar_bound_gs);
    long double ebar = energy(pb, xbar) - j0;
    if (ebar > e) {
      ++rep.rejected;
      std::copy(x.begin(), x.end(), xbar.begin());
      ebar = e;
    }

    Truncation tr = truncate(pb, xbar, cfg_.stiff_truncation);
    std::copy(pb.A->val.begin(), pb.A->val.end(), work_.val.begin());
    for (std::size_t k = 0; k < pb.contacts.size(); ++k)
      work_.val[pb.diag_pos[pb.contacts[k].dof]] += tr.hessian[k];
    // coarse levels are kept while the truncated operator stays close to the one they came from
    bool rebuild = it == 1 || !cfg_.reuse_coarse || tr.mask != mask_built;
    for (std::size_t k = 0; k < pb.contacts.size() && !rebuild; ++k) {
      const double a = pb.A->val[pb.diag_pos[pb.contacts[k].dof]];
      rebuild = std::abs(tr.hessian[k] - h_built[k]) > 0.25 * (a + h_built[k]);
    }
    if (rebuild) {
      mask_built = tr.mask;
      h_built = tr.hessian;
    }
    mg_.set_operator(work_, tr.mask, cfg_.exec, rebuild);

    residual(*pb.A, xbar, pb.b, r);
    for (const auto &c : pb.contacts) {
      const double v = xbar[c.dof];
      const double gv = c.g.derivative(std::abs(v));
      r[c.dof] -= v > 0 ? gv : -gv;
    }
    for (int i = 0; i < n; ++i)
      if (tr.mask[i]) r[i] = 0.0;
    std::fill(d.begin(), d.end(), 0.0);
    for (int v = 0; v < cfg_.vcycles; ++v)
      mg_.vcycle(d, r, cfg_.pre_smooth, cfg_.post_smooth, cfg_.smoother_damping);

    double rho = line_search(pb, xbar, d);
    for (int i = 0; i < n; ++i) x[i] = xbar[i] + rho * d[i];
    long double enew = energy(pb, x) - j0;
    if (enew > ebar) {
      ++rep.rejected;
      std::copy(xbar.begin(), xbar.end(), x.begin());
      enew = ebar;
      rho = 0.0;
    }
    e = enew;
    rep.energies.push_back(e);
    rep.damping.push_back(rho);
    rep.truncated.push_back(tr.truncated);
    rep.iterations = it;
    rep.vcycles += cfg_.vcycles;

    for (int i = 0; i < n; ++i) diff[i] = x[i] - prev[i];
    if (energy_norm(*pb.A, diff) <= cfg_.mg_tol) {
      rep.converged = true;
      break;
    }
  }
  return rep;
}

}  // namespace faultsim::solver

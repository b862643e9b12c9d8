#include <algorithm>
#include <cmath>

#include "faultsim/error.hpp"
#include "faultsim/solver.hpp"

namespace faultsim::solver {

void RateProblem::prepare() {
  const int n = A->rows;
  contact_of_dof.assign(n, -1);
  for (std::size_t k = 0; k < contacts.size(); ++k) contact_of_dof[contacts[k].dof] = static_cast<int>(k);
  diag_pos.resize(n);
  for (int i = 0; i < n; ++i) {
    diag_pos[i] = A->find(i, i);
    if (diag_pos[i] < 0) throw ConvergenceError("rate problem: missing diagonal entry");
  }
  if (block_start.empty()) {
    for (int i = 0; i <= n; i += 2) block_start.push_back(std::min(i, n));
    if (block_start.back() != n) block_start.push_back(n);
  }
  off_pos.assign(2 * n, -1);
  for (std::size_t b = 0; b + 1 < block_start.size(); ++b) {
    const int s = block_start[b];
    if (block_start[b + 1] - s != 2) continue;
    off_pos[2 * s] = A->find(s, s + 1);
    off_pos[2 * s + 1] = A->find(s + 1, s);
  }
}

long double energy(const RateProblem &pb, std::span<const double> x) {
  long double e = 0.5L * bilinear(*pb.A, x, x);
  for (int i = 0; i < pb.size(); ++i) e -= static_cast<long double>(pb.b[i]) * x[i];
  for (const auto &c : pb.contacts) e += c.g.value(std::abs(x[c.dof]));
  return e;
}

double energy_norm(const CsrMatrix &A, std::span<const double> d) {
  long double s = bilinear(A, d, d);
  return std::sqrt(static_cast<double>(std::max(s, 0.0L)));
}

double solve_local_contact(double q, double r, const friction::RatePotential &g) {
  if (r == 0.0) return 0.0;
  const double sign = r > 0 ? 1.0 : -1.0;
  const double R = std::abs(r);
  if (g.k == 0.0) return r / q;
  double z = std::log(R / q);
  if (z <= g.log_vm) return r / q;
  // F(z) = q e^z + k (z - log V_m) - R is increasing and convex in z = log|s|.
  double lo = g.log_vm, hi = z;
  for (int it = 0; it < 200; ++it) {
    const double ez = std::exp(z);
    const double F = q * ez + g.k * (z - g.log_vm) - R;
    if (F > 0)
      hi = z;
    else
      lo = z;
    double zn = z - F / (q * ez + g.k);
    if (!(zn > lo && zn < hi)) zn = 0.5 * (lo + hi);
    const double step = std::abs(zn - z);
    z = zn;
    if (step <= 1e-14 * std::max(1.0, std::abs(z)) || hi - lo <= 1e-14 * std::max(1.0, std::abs(hi)))
      break;
  }
  return sign * std::exp(z);
}

void gs_sweep(const RateProblem &pb, std::span<double> x, bool scalar_bound) {
  const CsrMatrix &A = *pb.A;
  const int nb = static_cast<int>(pb.block_start.size()) - 1;
  for (int blk = 0; blk < nb; ++blk) {
    const int s = pb.block_start[blk];
    const int size = pb.block_start[blk + 1] - s;
    if (size == 1) {
      double r = pb.b[s];
      for (int k = A.row_ptr[s]; k < A.row_ptr[s + 1]; ++k)
        if (A.col[k] != s) r -= A.val[k] * x[A.col[k]];
      const double q = A.val[pb.diag_pos[s]];
      const int c = pb.contact_of_dof[s];
      x[s] = c >= 0 ? solve_local_contact(q, r, pb.contacts[c].g) : r / q;
      continue;
    }
    double r[2];
    for (int i = 0; i < 2; ++i) {
      const int row = s + i;
      double acc = pb.b[row];
      for (int k = A.row_ptr[row]; k < A.row_ptr[row + 1]; ++k) {
        const int j = A.col[k];
        if (j < s || j >= s + 2) acc -= A.val[k] * x[j];
      }
      r[i] = acc;
    }
    const double a00 = A.val[pb.diag_pos[s]], a11 = A.val[pb.diag_pos[s + 1]];
    const double a01 = pb.off_pos[2 * s] >= 0 ? A.val[pb.off_pos[2 * s]] : 0.0;
    const double a10 = pb.off_pos[2 * s + 1] >= 0 ? A.val[pb.off_pos[2 * s + 1]] : 0.0;
    if (!scalar_bound) {
      const double det = a00 * a11 - a01 * a10;
      x[s] = (a11 * r[0] - a01 * r[1]) / det;
      x[s + 1] = (a00 * r[1] - a10 * r[0]) / det;
    } else {
      const double lmax = 0.5 * (a00 + a11 + std::sqrt((a00 - a11) * (a00 - a11) + 4 * a01 * a10));
      for (int rep = 0; rep < 3; ++rep) {
        const double d0 = r[0] - a00 * x[s] - a01 * x[s + 1];
        const double d1 = r[1] - a10 * x[s] - a11 * x[s + 1];
        x[s] += d0 / lmax;
        x[s + 1] += d1 / lmax;
      }
    }
  }
}

ReferenceReport solve_rate_reference(const RateProblem &pb, std::span<double> x, int max_sweeps,
                                     double tol) {
  ReferenceReport rep;
  const int n = pb.size();
  std::vector<double> prev(n), diff(n);
  long double e_prev = energy(pb, x);
  rep.energies.push_back(e_prev);
  int flat = 0;
  for (rep.sweeps = 1; rep.sweeps <= max_sweeps; ++rep.sweeps) {
    std::copy(x.begin(), x.end(), prev.begin());
    gs_sweep(pb, x);
    for (int i = 0; i < n; ++i) diff[i] = x[i] - prev[i];
    const long double e = energy(pb, x);
    rep.energies.push_back(e);
    if (energy_norm(*pb.A, diff) <= tol) {
      rep.stop = ReferenceStop::increment;
      return rep;
    }
    flat = e >= e_prev ? flat + 1 : 0;
    if (flat >= 10) {
      rep.stop = ReferenceStop::stagnation;
      return rep;
    }
    e_prev = std::min(e, e_prev);
  }
  rep.sweeps = max_sweeps;
  rep.stop = ReferenceStop::cap;
  return rep;
}

Truncation truncate(const RateProblem &pb, std::span<const double> x, double stiff_ratio) {
  Truncation t;
  t.mask.assign(pb.size(), 0);
  t.hessian.assign(pb.contacts.size(), 0.0);
  for (std::size_t k = 0; k < pb.contacts.size(); ++k) {
    const auto &c = pb.contacts[k];
    if (c.g.k == 0.0) continue;
    const double V = std::abs(x[c.dof]);
    const double vm = c.g.vm();
    if (std::abs(V - vm) <= 1e-14 * std::max(vm, V)) {
      t.mask[c.dof] = 1;
      ++t.truncated;
      continue;
    }
    const double h = c.g.second(V);
    if (stiff_ratio > 0 && h > stiff_ratio * pb.A->val[pb.diag_pos[c.dof]]) {
      t.mask[c.dof] = 1;
      ++t.truncated;
      continue;
    }
    t.hessian[k] = h;
  }
  return t;
}

double line_search(const RateProblem &pb, std::span<const double> x, std::span<const double> d) {
  const int n = pb.size();
  bool zero = true;
  for (int i = 0; i < n && zero; ++i) zero = d[i] == 0.0;
  if (zero) return 0.0;

  std::vector<double> ax(n), ad(n);
  spmv(*pb.A, x, ax);
  spmv(*pb.A, d, ad);
  long double c1 = 0.0L, c2 = 0.0L;
  for (int i = 0; i < n; ++i) {
    c1 += static_cast<long double>(d[i]) * (ax[i] - pb.b[i]);
    c2 += static_cast<long double>(d[i]) * ad[i];
  }
  std::vector<std::pair<int, const friction::RatePotential *>> active;
  for (const auto &c : pb.contacts)
    if (d[c.dof] != 0.0 && c.g.k != 0.0) active.emplace_back(c.dof, &c.g);

  auto slope = [&](double rho) {
    long double s = c1 + rho * c2;
    for (const auto &[i, g] : active) {
      const double v = x[i] + rho * d[i];
      const double gv = g->derivative(std::abs(v));
      if (gv != 0.0) s += (v > 0 ? gv : -gv) * d[i];
    }
    return s;
  };
  auto delta = [&](double rho) {
    long double s = rho * c1 + 0.5L * rho * rho * c2;
    for (const auto &[i, g] : active)
      s += static_cast<long double>(g->value(std::abs(x[i] + rho * d[i]))) - g->value(std::abs(x[i]));
    return s;
  };

  if (slope(0.0) >= 0) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k < 200 && slope(hi) < 0; ++k) {
    lo = hi;
    hi *= 2;
  }
  for (int k = 0; k < 200 && hi - lo > 1e-12 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  const double rho = 0.5 * (lo + hi);
  return delta(rho) <= 0 ? rho : 0.0;
}

}  // namespace faultsim::solver

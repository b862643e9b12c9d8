#include "faultsim/mortar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "faultsim/error.hpp"

namespace faultsim::mortar {

std::vector<FaultGeometry> fault_geometry(const fem::Level &level, const fem::DofMap &dofs,
                                          const std::vector<mesh::Interface> &interfaces) {
  std::vector<FaultGeometry> out;
  for (const auto &itf : interfaces) {
    FaultGeometry f;
    f.interface = itf.id;
    for (int side = 0; side < 2; ++side) {
      int body = side == 0 ? itf.bottom_body : itf.top_body;
      const mesh::FaultTrace *tr = level[body].trace(itf.id);
      if (!tr || tr->body_is_bottom != (side == 0))
        throw InvalidSpecError("fault " + std::to_string(itf.id) + " has no trace on body " +
                               std::to_string(body));
      FaultSide &fs = side == 0 ? f.bottom : f.top;
      fs.body = body;
      for (int v : tr->nodes) fs.nodes.push_back(dofs.global(body, v));
    }
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

Vec2 deformed(std::span<const Vec2> X, std::span<const double> u, int v) {
  return {X[v].x + u[2 * v], X[v].y + u[2 * v + 1]};
}

const double kGaussPts[3] = {0.5 - 0.5 * 0.7745966692414834, 0.5, 0.5 + 0.5 * 0.7745966692414834};
const double kGaussWts[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

}  // namespace

ContactMap build_contact_map(const FaultGeometry &f, std::span<const Vec2> X,
                             std::span<const double> u) {
  const auto &bn = f.bottom.nodes;
  const auto &tn = f.top.nodes;
  const int nb = static_cast<int>(bn.size()), nt = static_cast<int>(tn.size());
  ContactMap m;
  m.image.assign(nb, std::numeric_limits<double>::quiet_NaN());
  m.node_included.assign(nb, 0);
  m.elem_included.assign(nb - 1, 0);
  m.in_contact.assign(nb, 0);
  m.deformed_length.resize(nb - 1);

  std::vector<Vec2> top(nt);
  for (int j = 0; j < nt; ++j) top[j] = deformed(X, u, tn[j]);

  for (int i = 0; i < nb; ++i) {
    Vec2 p = deformed(X, u, bn[i]);
    double best = std::numeric_limits<double>::infinity();
    int seg = -1;
    double rbest = 0.0;
    bool outside = false;
    for (int j = 0; j + 1 < nt; ++j) {
      Vec2 d = top[j + 1] - top[j];
      double r = dot(p - top[j], d) / dot(d, d);
      bool out_here = (j == 0 && r < -1e-12) || (j + 2 == nt && r > 1.0 + 1e-12);
      double rc = std::clamp(r, 0.0, 1.0);
      double dist = distance(p, top[j] + rc * d);
      if (dist < best) {
        best = dist;
        seg = j;
        rbest = rc;
        outside = out_here;
      }
    }
    if (seg < 0 || outside) continue;
    double x0 = X[tn[seg]].x, x1 = X[tn[seg + 1]].x;
    m.image[i] = x0 + rbest * (x1 - x0);
    m.node_included[i] = 1;
  }

  std::vector<double> tx(nt);
  for (int j = 0; j < nt; ++j) tx[j] = X[tn[j]].x;
  for (int e = 0; e + 1 < nb; ++e) {
    m.deformed_length[e] = distance(deformed(X, u, bn[e]), deformed(X, u, bn[e + 1]));
    if (!m.node_included[e] || !m.node_included[e + 1]) continue;
    if (!(m.deformed_length[e] > 1e-14))
      throw DegenerateGeometryError("zero-length deformed fault element");
    double a = m.image[e], b = m.image[e + 1];
    if (!(b > a)) throw DegenerateGeometryError("contact map is not injective");
    m.elem_included[e] = 1;
    m.in_contact[e] = m.in_contact[e + 1] = 1;
    int j = static_cast<int>(std::upper_bound(tx.begin(), tx.end(), a) - tx.begin()) - 1;
    j = std::clamp(j, 0, nt - 2);
    double lo = a;
    while (lo < b) {
      double hi = std::min(b, tx[j + 1]);
      if (hi > lo) {
        double h = tx[j + 1] - tx[j];
        m.overlaps.push_back({e, (lo - a) / (b - a), (hi - a) / (b - a), j, (lo - tx[j]) / h,
                              (hi - tx[j]) / h});
      }
      lo = hi;
      if (j + 2 >= nt) break;
      ++j;
    }
    if (!m.overlaps.empty() && m.overlaps.back().bottom_elem == e) m.overlaps.back().s1 = 1.0;
  }
  if (m.overlaps.empty()) throw NoContactError("fault " + std::to_string(f.interface) + ": empty contact zone");
  return m;
}

DualBasis build_dual_basis(const ContactMap &map) {
  const int ne = static_cast<int>(map.elem_included.size());
  DualBasis d;
  d.coef.assign(ne, {});
  d.norm.assign(ne + 1, 0.0);
  for (int e = 0; e < ne; ++e) {
    if (!map.elem_included[e]) continue;
    const double l = map.deformed_length[e];
    if (!(l > 1e-14)) throw DegenerateGeometryError("singular local mortar mass");
    // coef = D_e * M_e^{-1} with M_e = l/6 [2 1; 1 2], D_e = l/2 I.
    const double m00 = l / 3.0, m01 = l / 6.0;
    const double det = m00 * m00 - m01 * m01;
    const double inv00 = m00 / det, inv01 = -m01 / det;
    for (int i = 0; i < 2; ++i) {
      d.coef[e][i][i] = 0.5 * l * inv00;
      d.coef[e][i][1 - i] = 0.5 * l * inv01;
    }
    d.norm[e] += 0.5 * l;
    d.norm[e + 1] += 0.5 * l;
  }
  return d;
}

std::vector<Frame> nodal_normals(const FaultGeometry &f, const ContactMap &map,
                                 std::span<const Vec2> X, std::span<const double> u) {
  const auto &bn = f.bottom.nodes;
  const int nb = static_cast<int>(bn.size());
  std::vector<Frame> out(nb);
  for (int i = 0; i < nb; ++i) {
    Vec2 n{0.0, 0.0};
    for (int e : {i - 1, i}) {
      if (e < 0 || e + 1 >= nb) continue;
      Vec2 d = deformed(X, u, bn[e + 1]) - deformed(X, u, bn[e]);
      n += (1.0 / norm(d)) * Vec2{-d.y, d.x};
    }
    n = (1.0 / norm(n)) * n;
    out[i] = {n, {-n.y, n.x}};
  }
  (void)map;
  return out;
}

std::vector<std::vector<WeightEntry>> mortar_weights(const FaultGeometry &f, const ContactMap &map,
                                                     const DualBasis &dual) {
  const auto &bn = f.bottom.nodes;
  const auto &tn = f.top.nodes;
  std::vector<std::vector<double>> dense(bn.size());
  std::vector<std::vector<WeightEntry>> out(bn.size());
  for (const auto &ov : map.overlaps) {
    const int e = ov.bottom_elem;
    const double len = map.deformed_length[e] * (ov.s1 - ov.s0);
    for (int g = 0; g < 3; ++g) {
      const double s = ov.s0 + (ov.s1 - ov.s0) * kGaussPts[g];
      const double r = ov.r0 + (ov.r1 - ov.r0) * kGaussPts[g];
      const double w = len * kGaussWts[g];
      for (int end = 0; end < 2; ++end) {
        const int p = e + end;
        const double phi = dual.eval(e, end, s) / dual.norm[p];
        auto &row = dense[p];
        if (row.empty()) row.assign(tn.size(), 0.0);
        row[ov.top_elem] += w * phi * (1.0 - r);
        row[ov.top_elem + 1] += w * phi * r;
      }
    }
  }
  for (std::size_t p = 0; p < bn.size(); ++p) {
    if (!map.in_contact[p]) continue;
    for (std::size_t j = 0; j < tn.size(); ++j)
      if (dense[p][j] != 0.0) out[p].push_back({tn[j], dense[p][j]});
  }
  return out;
}

std::vector<std::vector<double>> biorthogonality_matrix(const FaultGeometry &f, const ContactMap &map,
                                                        const DualBasis &dual) {
  const int nb = static_cast<int>(f.bottom.nodes.size());
  std::vector<std::vector<double>> g(nb, std::vector<double>(nb, 0.0));
  for (const auto &ov : map.overlaps) {
    const int e = ov.bottom_elem;
    const double len = map.deformed_length[e] * (ov.s1 - ov.s0);
    for (int k = 0; k < 3; ++k) {
      const double s = ov.s0 + (ov.s1 - ov.s0) * kGaussPts[k];
      const double w = len * kGaussWts[k];
      const double lam[2] = {1.0 - s, s};
      for (int pe = 0; pe < 2; ++pe)
        for (int qe = 0; qe < 2; ++qe)
          g[e + pe][e + qe] += w * lam[pe] * dual.eval(e, qe, s) / dual.norm[e + qe];
    }
  }
  return g;
}

JumpBasisTransform build_jump_transform(const std::vector<FaultGeometry> &faults,
                                        const std::vector<ContactMap> &maps,
                                        const std::vector<DualBasis> &duals,
                                        const std::vector<std::vector<Frame>> &frames,
                                        const fem::DofMap &dofs) {
  JumpBasisTransform t;
  const int nf = dofs.num_free();
  t.num_nodal = 2 * nf;
  t.free_index = dofs.free_index;

  std::vector<int> contact_at(nf, -1);
  t.contact_of_node.resize(faults.size());
  t.weights.resize(faults.size());
  std::vector<ContactDof> pending;
  for (std::size_t f = 0; f < faults.size(); ++f) {
    const auto &bn = faults[f].bottom.nodes;
    t.contact_of_node[f].assign(bn.size(), -1);
    t.weights[f] = mortar_weights(faults[f], maps[f], duals[f]);
    for (std::size_t i = 0; i < bn.size(); ++i) {
      if (!maps[f].in_contact[i]) continue;
      int fi = dofs.free_index[bn[i]];
      if (fi < 0) continue;
      if (contact_at[fi] >= 0) throw InvalidSpecError("vertex is a contact node of two faults");
      contact_at[fi] = static_cast<int>(pending.size());
      pending.push_back({-1, static_cast<int>(f), static_cast<int>(i), bn[i], frames[f][i],
                         duals[f].norm[i]});
    }
  }

  t.sep_of_vertex.resize(nf);
  t.block_start.clear();
  int sep = 0;
  for (int fv = 0; fv < nf; ++fv) {
    t.sep_of_vertex[fv] = sep;
    t.block_start.push_back(sep);
    sep += contact_at[fv] >= 0 ? 1 : 2;
  }
  t.block_start.push_back(sep);
  t.num_sep = sep;

  std::vector<int> order(pending.size());
  for (int fv = 0, k = 0; fv < nf; ++fv)
    if (contact_at[fv] >= 0) order[contact_at[fv]] = k++;
  t.contacts.resize(pending.size());
  for (std::size_t k = 0; k < pending.size(); ++k) {
    ContactDof c = pending[k];
    c.sep = t.sep_of_vertex[dofs.free_index[c.vertex]];
    t.contact_of_node[c.fault][c.node] = order[k];
    t.contacts[order[k]] = c;
  }

  std::vector<Triplet> fwd, inv;
  for (int fv = 0; fv < nf; ++fv) {
    const int s = t.sep_of_vertex[fv];
    if (contact_at[fv] < 0) {
      for (int c = 0; c < 2; ++c) {
        fwd.push_back({2 * fv + c, s + c, 1.0});
        inv.push_back({s + c, 2 * fv + c, 1.0});
      }
      continue;
    }
    const ContactDof &cd = t.contacts[order[contact_at[fv]]];
    const Vec2 tan = cd.frame.t;
    const double tc[2] = {tan.x, tan.y};
    for (int c = 0; c < 2; ++c) {
      fwd.push_back({2 * fv + c, s, tc[c]});
      inv.push_back({s, 2 * fv + c, tc[c]});
    }
    for (const auto &w : t.weights[cd.fault][cd.node]) {
      int fj = dofs.free_index[w.top_vertex];
      if (fj < 0) throw InvalidSpecError("mortar node on a Dirichlet boundary");
      if (contact_at[fj] >= 0) throw InvalidSpecError("mortar node is itself a contact node");
      const int sj = t.sep_of_vertex[fj];
      for (int c = 0; c < 2; ++c) {
        fwd.push_back({2 * fv + c, sj + c, w.weight});
        inv.push_back({s, 2 * fj + c, -tc[c] * w.weight});
      }
    }
  }
  t.to_nodal = csr_from_triplets(t.num_nodal, t.num_sep, std::move(fwd));
  t.to_sep = csr_from_triplets(t.num_sep, t.num_nodal, std::move(inv));
  return t;
}

std::vector<double> JumpBasisTransform::apply(std::span<const double> sep) const {
  std::vector<double> out(num_nodal);
  spmv(to_nodal, sep, out);
  return out;
}

std::vector<double> JumpBasisTransform::apply_inverse(std::span<const double> nodal) const {
  std::vector<double> out(num_sep);
  spmv(to_sep, nodal, out);
  return out;
}

std::vector<double> JumpBasisTransform::project(std::span<const double> nodal) const {
  return apply(apply_inverse(nodal));
}

std::vector<Vec2> JumpBasisTransform::jumps(std::span<const double> nodal) const {
  std::vector<Vec2> out(contacts.size());
  for (std::size_t k = 0; k < contacts.size(); ++k) {
    const ContactDof &c = contacts[k];
    const int fp = free_index[c.vertex];
    Vec2 j{nodal[2 * fp], nodal[2 * fp + 1]};
    for (const auto &w : weights[c.fault][c.node]) {
      const int fj = free_index[w.top_vertex];
      j.x -= w.weight * nodal[2 * fj];
      j.y -= w.weight * nodal[2 * fj + 1];
    }
    out[k] = j;
  }
  return out;
}

Coupling build_coupling(const std::vector<FaultGeometry> &faults, std::span<const Vec2> positions,
                        std::span<const double> u, const fem::DofMap &dofs) {
  Coupling c;
  for (const auto &f : faults) {
    c.maps.push_back(build_contact_map(f, positions, u));
    c.duals.push_back(build_dual_basis(c.maps.back()));
    c.frames.push_back(nodal_normals(f, c.maps.back(), positions, u));
  }
  c.transform = build_jump_transform(faults, c.maps, c.duals, c.frames, dofs);
  return c;
}

void write_weights(const JumpBasisTransform &t, const std::string &path) {
  std::ofstream out(path);
  out.precision(17);
  for (const auto &c : t.contacts)
    for (const auto &w : t.weights[c.fault][c.node])
      out << c.vertex << ' ' << w.top_vertex << ' ' << w.weight << '\n';
}

}  // namespace faultsim::mortar

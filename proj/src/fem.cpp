#include "faultsim/fem.hpp"

#include <cmath>

#include "faultsim/error.hpp"

namespace faultsim::fem {

void MaterialParams::validate() const {
  if (!(E > 0)) throw ConfigError("material: E must be positive");
  if (!(nu > 0 && nu < 0.5)) throw ConfigError("material: nu must lie in (0, 0.5)");
  if (!(rho > 0)) throw ConfigError("material: rho must be positive");
  if (!(c_A >= 0)) throw ConfigError("material: c_A must be nonnegative");
  if (!(g >= 0)) throw ConfigError("material: g must be nonnegative");
}

DofMap DofMap::build(const Level &level) {
  DofMap d;
  d.offset.push_back(0);
  for (const auto &m : level) d.offset.push_back(d.offset.back() + static_cast<int>(m.vertices.size()));
  d.free_index.assign(d.offset.back(), -1);
  for (std::size_t b = 0; b < level.size(); ++b) {
    auto dir = level[b].boundary_flags(mesh::BoundaryKind::dirichlet);
    for (int v = 0; v < static_cast<int>(dir.size()); ++v) {
      int g = d.offset[b] + v;
      if (dir[v]) {
        d.dirichlet_vertices.push_back(g);
      } else {
        d.free_index[g] = static_cast<int>(d.free_vertices.size());
        d.free_vertices.push_back(g);
      }
    }
  }
  return d;
}

std::vector<Vec2> global_positions(const Level &level, const DofMap &dofs) {
  std::vector<Vec2> out(dofs.num_vertices());
  for (std::size_t b = 0; b < level.size(); ++b)
    for (std::size_t v = 0; v < level[b].vertices.size(); ++v)
      out[dofs.offset[b] + v] = level[b].vertices[v];
  return out;
}

namespace {

std::array<Vec2, 3> gradients(const TrianglePoints &t, double &area) {
  area = signed_area(t);
  if (!(std::abs(area) >= 1e-14)) throw AssemblyError("degenerate triangle");
  const double s = 1.0 / (2.0 * area);
  std::array<Vec2, 3> g;
  for (int i = 0; i < 3; ++i) {
    Vec2 a = t[(i + 1) % 3], b = t[(i + 2) % 3];
    g[i] = {(a.y - b.y) * s, (b.x - a.x) * s};
  }
  area = std::abs(area);
  return g;
}

template <class ElementFn>
CsrMatrix assemble(const Level &level, const DofMap &dofs, ElementFn &&element, Exec exec) {
  std::vector<std::pair<int, int>> elements;
  for (std::size_t b = 0; b < level.size(); ++b)
    for (std::size_t t = 0; t < level[b].triangles.size(); ++t)
      elements.emplace_back(static_cast<int>(b), static_cast<int>(t));
  const int ne = static_cast<int>(elements.size());
  std::vector<ElementMatrix> local(ne);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int e = 0; e < ne; ++e)
      local[e] = element(level[elements[e].first].points(elements[e].second));
  } else {
    for (int e = 0; e < ne; ++e)
      local[e] = element(level[elements[e].first].points(elements[e].second));
  }
  std::vector<Triplet> trip;
  trip.reserve(36 * static_cast<std::size_t>(ne));
  for (int e = 0; e < ne; ++e) {
    const auto &[b, t] = elements[e];
    const auto &tri = level[b].triangles[t];
    int dof[6];
    for (int i = 0; i < 3; ++i) {
      dof[2 * i] = 2 * dofs.global(b, tri[i]);
      dof[2 * i + 1] = dof[2 * i] + 1;
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) trip.push_back({dof[i], dof[j], local[e][i][j]});
  }
  const int n = 2 * dofs.num_vertices();
  return csr_from_triplets(n, n, std::move(trip));
}

}  // namespace

ElementMatrix element_stiffness(const TrianglePoints &t, double lambda, double mu) {
  double area;
  auto g = gradients(t, area);
  // Strain-displacement rows: exx, eyy, 2exy.
  double Bm[3][6] = {};
  for (int i = 0; i < 3; ++i) {
    Bm[0][2 * i] = g[i].x;
    Bm[1][2 * i + 1] = g[i].y;
    Bm[2][2 * i] = g[i].y;
    Bm[2][2 * i + 1] = g[i].x;
  }
  const double D[3][3] = {{lambda + 2 * mu, lambda, 0}, {lambda, lambda + 2 * mu, 0}, {0, 0, mu}};
  ElementMatrix K{};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double s = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) s += Bm[a][i] * D[a][b] * Bm[b][j];
      K[i][j] = area * s;
    }
  return K;
}

ElementMatrix element_mass(const TrianglePoints &t, double rho, bool lumped) {
  const double area = std::abs(signed_area(t));
  if (!(area >= 1e-14)) throw AssemblyError("degenerate triangle");
  ElementMatrix Me{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = lumped ? (i == j ? rho * area / 3.0 : 0.0) : rho * area / 12.0 * (i == j ? 2.0 : 1.0);
      Me[2 * i][2 * j] = v;
      Me[2 * i + 1][2 * j + 1] = v;
    }
  return Me;
}

CsrMatrix assemble_elasticity(const Level &level, const DofMap &dofs, const MaterialParams &p,
                              Exec exec) {
  const double lambda = p.lame_lambda(), mu = p.lame_mu();
  return assemble(level, dofs, [&](const TrianglePoints &t) { return element_stiffness(t, lambda, mu); },
                  exec);
}

CsrMatrix assemble_viscosity(const Level &level, const DofMap &dofs, const MaterialParams &p,
                             Exec exec) {
  CsrMatrix a = assemble_elasticity(level, dofs, p, exec);
  for (double &v : a.val) v *= p.c_A;
  return a;
}

CsrMatrix assemble_mass(const Level &level, const DofMap &dofs, const MaterialParams &p,
                        Exec exec) {
  return assemble(level, dofs,
                  [&](const TrianglePoints &t) { return element_mass(t, p.rho, p.lumped_mass); }, exec);
}

std::vector<double> assemble_load(const Level &level, const DofMap &dofs, const MaterialParams &p,
                                  const Traction &neumann) {
  std::vector<double> f(2 * dofs.num_vertices(), 0.0);
  for (std::size_t b = 0; b < level.size(); ++b) {
    const auto &m = level[b];
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
      const double area = std::abs(signed_area(m.points(t)));
      for (int v : m.triangles[t]) f[2 * dofs.global(b, v) + 1] -= p.rho * p.g * area / 3.0;
    }
    if (!neumann) continue;
    for (const auto &face : m.boundary) {
      if (face.tag.kind != mesh::BoundaryKind::neumann) continue;
      Vec2 tr = neumann(m, face);
      const double half = 0.5 * distance(m.vertices[face.a], m.vertices[face.b]);
      for (int v : {face.a, face.b}) {
        f[2 * dofs.global(b, v)] += half * tr.x;
        f[2 * dofs.global(b, v) + 1] += half * tr.y;
      }
    }
  }
  return f;
}

void compose_an_values(const CsrMatrix &M, const CsrMatrix &A, const CsrMatrix &B, double tau,
                       CsrMatrix &out) {
  if (!out.same_pattern(M)) out = M;
  const double cm = 2.0 / tau, cb = 0.5 * tau;
  for (std::size_t k = 0; k < M.val.size(); ++k) out.val[k] = cm * M.val[k] + A.val[k] + cb * B.val[k];
}

CsrMatrix compose_an(const CsrMatrix &M, const CsrMatrix &A, const CsrMatrix &B, double tau) {
  if (!M.same_pattern(A) || !M.same_pattern(B)) throw AssemblyError("compose_an: pattern mismatch");
  CsrMatrix out = M;
  compose_an_values(M, A, B, tau, out);
  return out;
}

std::vector<double> compose_ln(const CsrMatrix &M, const CsrMatrix &B,
                               const std::vector<double> &load, const std::vector<double> &u,
                               const std::vector<double> &ud, const std::vector<double> &udd,
                               double tau) {
  const std::size_t n = load.size();
  std::vector<double> w(n), mw(n), bw(n), out(load);
  for (std::size_t i = 0; i < n; ++i) w[i] = udd[i] + (2.0 / tau) * ud[i];
  spmv(M, w, mw);
  for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 * tau * ud[i] + u[i];
  spmv(B, w, bw);
  for (std::size_t i = 0; i < n; ++i) out[i] += mw[i] - bw[i];
  return out;
}

FreeBlock FreeBlock::build(const CsrMatrix &full, const DofMap &dofs) {
  FreeBlock fb;
  const int nf = 2 * dofs.num_free();
  fb.matrix.rows = fb.matrix.cols = nf;
  fb.matrix.row_ptr.assign(nf + 1, 0);
  for (int fv = 0; fv < dofs.num_free(); ++fv)
    for (int c = 0; c < 2; ++c) {
      int r = 2 * dofs.free_vertices[fv] + c;
      for (int k = full.row_ptr[r]; k < full.row_ptr[r + 1]; ++k) {
        int fi = dofs.free_index[full.col[k] / 2];
        if (fi < 0) continue;
        fb.matrix.col.push_back(2 * fi + full.col[k] % 2);
        fb.full_pos.push_back(k);
      }
      fb.matrix.row_ptr[2 * fv + c + 1] = static_cast<int>(fb.matrix.col.size());
    }
  fb.matrix.val.resize(fb.matrix.col.size());
  fb.update(full);
  return fb;
}

void FreeBlock::update(const CsrMatrix &full) {
  for (std::size_t k = 0; k < full_pos.size(); ++k) matrix.val[k] = full.val[full_pos[k]];
}

CsrMatrix prolongation(const Level &coarse, const DofMap &coarse_dofs, const Level &fine,
                       const DofMap &fine_dofs) {
  std::vector<Triplet> t;
  for (std::size_t b = 0; b < fine.size(); ++b)
    for (std::size_t v = 0; v < fine[b].vertices.size(); ++v) {
      int fi = fine_dofs.free_index[fine_dofs.global(static_cast<int>(b), static_cast<int>(v))];
      if (fi < 0) continue;
      for (const auto &pw : fine[b].parents[v]) {
        int ci = coarse_dofs.free_index[coarse_dofs.global(static_cast<int>(b), pw.vertex)];
        if (ci < 0) continue;
        t.push_back({2 * fi, 2 * ci, pw.weight});
        t.push_back({2 * fi + 1, 2 * ci + 1, pw.weight});
      }
    }
  (void)coarse;
  return csr_from_triplets(2 * fine_dofs.num_free(), 2 * coarse_dofs.num_free(), std::move(t));
}

}  // namespace faultsim::fem

#include "faultsim/model.hpp"

#include <cmath>
#include <numbers>

#include "faultsim/error.hpp"

namespace faultsim {

double stepper::LoadingProfile::xi(double t) const {
  if (t > T0 / 10.0) return 1.0;
  const double k = smooth_ramp ? 10.0 : 4.0;  // 10 pi reaches 1 at T0/10
  return 0.5 * (1.0 - std::cos(k * std::numbers::pi * t / T0));
}

std::vector<double> lithostatic_sigma(const std::vector<mesh::SubdomainSpec> &spec,
                                      const fem::MaterialParams &mat) {
  std::vector<double> out;
  if (spec.empty()) return out;
  const double y_top = spec.back().rect.y_max;
  for (std::size_t i = 0; i + 1 < spec.size(); ++i)
    out.push_back(mat.rho * mat.g * (y_top - spec[i].rect.y_max));
  return out;
}

Model::Model(const ModelSpec &spec) : spec_(spec) {
  spec_.material.validate();
  auto interfaces = mesh::interfaces_of(spec_.subdomains);
  if (spec_.friction.size() != interfaces.size())
    throw ConfigError("one friction parameter set per fault expected (" +
                      std::to_string(interfaces.size()) + " faults)");
  for (const auto &f : spec_.friction) f.validate();

  auto initial = mesh::build_initial_mesh(spec_.subdomains, spec_.h0);
  hierarchy_ = mesh::refine_adaptive(initial, interfaces, spec_.refinement);
  for (const auto &level : hierarchy_.levels) dofs_.push_back(fem::DofMap::build(level));
  for (int k = 1; k < static_cast<int>(hierarchy_.levels.size()); ++k)
    prolong_.push_back(fem::prolongation(hierarchy_.levels[k - 1], dofs_[k - 1],
                                         hierarchy_.levels[k], dofs_[k]));

  const auto &level = hierarchy_.fine();
  const auto &d = dofs_.back();
  positions_ = fem::global_positions(level, d);
  M_ = fem::assemble_mass(level, d, spec_.material, spec_.exec);
  A_ = fem::assemble_viscosity(level, d, spec_.material, spec_.exec);
  B_ = fem::assemble_elasticity(level, d, spec_.material, spec_.exec);
  load_ = fem::assemble_load(level, d, spec_.material);

  faults_ = mortar::fault_geometry(level, d, interfaces);
  state_offset_.push_back(0);
  for (const auto &f : faults_) {
    const auto &bn = f.bottom.nodes;
    for (std::size_t i = 0; i < bn.size(); ++i) {
      double c = 0.0;
      if (i > 0) c += 0.5 * distance(positions_[bn[i]], positions_[bn[i - 1]]);
      if (i + 1 < bn.size()) c += 0.5 * distance(positions_[bn[i]], positions_[bn[i + 1]]);
      cells_.push_back(c);
    }
    state_offset_.push_back(state_offset_.back() + static_cast<int>(bn.size()));
  }

  moving_.assign(d.num_vertices(), 0);
  for (std::size_t b = 0; b < level.size(); ++b) {
    const auto &m = level[b];
    for (const auto &face : m.boundary) {
      if (face.tag.kind != mesh::BoundaryKind::dirichlet) continue;
      if (m.vertices[face.a].y == m.rect.y_max && m.vertices[face.b].y == m.rect.y_max &&
          b + 1 == level.size()) {
        moving_[d.global(static_cast<int>(b), face.a)] = 1;
        moving_[d.global(static_cast<int>(b), face.b)] = 1;
      }
    }
  }
}

double Model::state_norm(const std::vector<double> &a, const std::vector<double> &b) const {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double dd = a[i] - b[i];
    s += cells_[i] * dd * dd;
  }
  return std::sqrt(static_cast<double>(s));
}

std::vector<double> Model::dirichlet_velocity(double t) const {
  std::vector<double> w(num_full(), 0.0);
  const double v = spec_.loading.v_D * spec_.loading.xi(t);
  for (std::size_t i = 0; i < moving_.size(); ++i)
    if (moving_[i]) w[2 * i] = v;
  return w;
}

}  // namespace faultsim

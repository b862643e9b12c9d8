#pragma once

#include <array>
#include <functional>
#include <vector>

#include "faultsim/mesh.hpp"
#include "faultsim/sparse.hpp"

namespace faultsim::fem {

struct MaterialParams {
  double E = 4.12e7;     // Pa
  double nu = 0.3;
  double rho = 5e3;      // kg/m^2
  double g = 9.81;       // N/kg
  double c_A = 1e-3;     // s, viscosity tensor = c_A * elasticity tensor
  bool lumped_mass = false;

  void validate() const;
  double lame_lambda() const { return E * nu / ((1 + nu) * (1 - 2 * nu)); }
  double lame_mu() const { return E / (2 * (1 + nu)); }
};

using Level = std::vector<mesh::Triangulation>;

// Global vertex numbering across bodies; dof of (vertex, component) is
// 2*vertex + component, free dof is 2*free_index + component.
struct DofMap {
  std::vector<int> offset;      // per body, plus total
  std::vector<int> free_index;  // -1 on Dirichlet vertices
  std::vector<int> free_vertices;
  std::vector<int> dirichlet_vertices;

  static DofMap build(const Level &level);
  int num_vertices() const { return offset.back(); }
  int num_free() const { return static_cast<int>(free_vertices.size()); }
  int global(int body, int v) const { return offset[body] + v; }
};

std::vector<Vec2> global_positions(const Level &level, const DofMap &dofs);

using ElementMatrix = std::array<std::array<double, 6>, 6>;
ElementMatrix element_stiffness(const TrianglePoints &t, double lambda, double mu);
ElementMatrix element_mass(const TrianglePoints &t, double rho, bool lumped);

// All operators act on full (free + Dirichlet) vertex dofs and share a pattern.
CsrMatrix assemble_elasticity(const Level &level, const DofMap &dofs, const MaterialParams &p,
                              Exec exec = Exec::serial);
CsrMatrix assemble_viscosity(const Level &level, const DofMap &dofs, const MaterialParams &p,
                             Exec exec = Exec::serial);
CsrMatrix assemble_mass(const Level &level, const DofMap &dofs, const MaterialParams &p,
                        Exec exec = Exec::serial);

using Traction = std::function<Vec2(const mesh::Triangulation &, const mesh::BoundaryFace &)>;
std::vector<double> assemble_load(const Level &level, const DofMap &dofs, const MaterialParams &p,
                                  const Traction &neumann = {});

CsrMatrix compose_an(const CsrMatrix &M, const CsrMatrix &A, const CsrMatrix &B, double tau);
void compose_an_values(const CsrMatrix &M, const CsrMatrix &A, const CsrMatrix &B, double tau,
                       CsrMatrix &out);
std::vector<double> compose_ln(const CsrMatrix &M, const CsrMatrix &B,
                               const std::vector<double> &load, const std::vector<double> &u,
                               const std::vector<double> &ud, const std::vector<double> &udd,
                               double tau);

// Free-free block of a full operator; positions index the full matrix values.
struct FreeBlock {
  CsrMatrix matrix;
  std::vector<int> full_pos;

  static FreeBlock build(const CsrMatrix &full, const DofMap &dofs);
  void update(const CsrMatrix &full);
};

// Nodal interpolation from level k-1 to level k restricted to free dofs.
CsrMatrix prolongation(const Level &coarse, const DofMap &coarse_dofs, const Level &fine,
                       const DofMap &fine_dofs);

}  // namespace faultsim::fem

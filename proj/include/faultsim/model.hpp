#pragma once

#include <vector>

#include "faultsim/fem.hpp"
#include "faultsim/friction.hpp"
#include "faultsim/mesh.hpp"
#include "faultsim/mortar.hpp"
#include "faultsim/state.hpp"

namespace faultsim {

struct ModelSpec {
  std::vector<mesh::SubdomainSpec> subdomains;
  double h0 = 1.0;
  mesh::RefinementOptions refinement;
  fem::MaterialParams material;
  std::vector<friction::FrictionParams> friction;  // one per fault
  stepper::LoadingProfile loading;
  double alpha0 = -10.0;
  Exec exec = Exec::serial;
};

// Lithostatic overburden rho*g*(y_top - y_fault) for every interface.
std::vector<double> lithostatic_sigma(const std::vector<mesh::SubdomainSpec> &spec,
                                      const fem::MaterialParams &mat);

// Static, immutable discretisation: meshes, operators, fault data.
class Model {
 public:
  explicit Model(const ModelSpec &spec);

  const ModelSpec &spec() const { return spec_; }
  const mesh::MeshHierarchy &hierarchy() const { return hierarchy_; }
  const fem::Level &fine() const { return hierarchy_.fine(); }
  const fem::DofMap &dofs() const { return dofs_.back(); }
  const fem::DofMap &dofs(int level) const { return dofs_[level]; }
  int levels() const { return static_cast<int>(dofs_.size()); }
  // prolongation(k) maps free dofs of level k-1 to level k (k >= 1).
  const CsrMatrix &prolongation(int k) const { return prolong_[k - 1]; }

  const std::vector<Vec2> &positions() const { return positions_; }
  const CsrMatrix &mass() const { return M_; }
  const CsrMatrix &viscosity() const { return A_; }
  const CsrMatrix &elasticity() const { return B_; }
  const std::vector<double> &load() const { return load_; }

  const std::vector<mortar::FaultGeometry> &faults() const { return faults_; }
  const friction::FrictionParams &friction(int fault) const { return spec_.friction[fault]; }
  int state_offset(int fault) const { return state_offset_[fault]; }
  int state_size() const { return state_offset_.back(); }
  // Reference-length cell measure |C_p| per state node.
  const std::vector<double> &cell_measure() const { return cells_; }
  double state_norm(const std::vector<double> &a, const std::vector<double> &b) const;

  // Full-dof velocity vector carrying the Dirichlet data at time t.
  std::vector<double> dirichlet_velocity(double t) const;
  int num_full() const { return 2 * dofs().num_vertices(); }

 private:
  ModelSpec spec_;
  mesh::MeshHierarchy hierarchy_;
  std::vector<fem::DofMap> dofs_;
  std::vector<CsrMatrix> prolong_;
  std::vector<Vec2> positions_;
  CsrMatrix M_, A_, B_;
  std::vector<double> load_;
  std::vector<mortar::FaultGeometry> faults_;
  std::vector<int> state_offset_;
  std::vector<double> cells_;
  std::vector<char> moving_;
};

}  // namespace faultsim

#pragma once

#include <array>
#include <span>
#include <vector>

#include "faultsim/fem.hpp"
#include "faultsim/geometry.hpp"
#include "faultsim/sparse.hpp"

namespace faultsim::mortar {

// Trace of one body along one interface; nodes ordered by x.
struct FaultSide {
  int body = -1;
  std::vector<int> nodes;  // global vertex ids
};

struct FaultGeometry {
  int interface = -1;
  FaultSide bottom;  // non-mortar side
  FaultSide top;     // mortar side
};

std::vector<FaultGeometry> fault_geometry(const fem::Level &level, const fem::DofMap &dofs,
                                          const std::vector<mesh::Interface> &interfaces);

struct Overlap {
  int bottom_elem;  // element (nodes i, i+1) of the bottom trace
  double s0, s1;    // sub-interval of the bottom element parameter
  int top_elem;
  double r0, r1;    // matching top element parameters
};

struct ContactMap {
  std::vector<double> image;          // per bottom node: reference x of the image, NaN if excluded
  std::vector<char> node_included;    // image inside the top surface
  std::vector<char> elem_included;    // both end nodes included
  std::vector<char> in_contact;       // node supports an included element
  std::vector<double> deformed_length;  // per bottom element
  std::vector<Overlap> overlaps;
};

ContactMap build_contact_map(const FaultGeometry &f, std::span<const Vec2> positions,
                             std::span<const double> u);

// phi_q restricted to an included element e equals
// (coef[e][i][0]*lambda_left + coef[e][i][1]*lambda_right) / norm[q] for the
// element's end node i (0 = left, 1 = right).
struct DualBasis {
  std::vector<std::array<std::array<double, 2>, 2>> coef;
  std::vector<double> norm;  // per bottom node, 0 if not in contact

  // Unnormalised value of the end-i dual function on element e at parameter s.
  double eval(int elem, int end, double s) const {
    return coef[elem][end][0] * (1.0 - s) + coef[elem][end][1] * s;
  }
};

DualBasis build_dual_basis(const ContactMap &map);

struct Frame {
  Vec2 n, t;
};

std::vector<Frame> nodal_normals(const FaultGeometry &f, const ContactMap &map,
                                 std::span<const Vec2> positions, std::span<const double> u);

struct WeightEntry {
  int top_vertex;  // global vertex id
  double weight;
};

// Per bottom node: coefficients of the weak jump <lambda_j o pi, phi_p>.
std::vector<std::vector<WeightEntry>> mortar_weights(const FaultGeometry &f, const ContactMap &map,
                                                     const DualBasis &dual);

// <lambda_p, phi_q> by 3-point Gauss quadrature over overlaps, for contact nodes.
std::vector<std::vector<double>> biorthogonality_matrix(const FaultGeometry &f, const ContactMap &map,
                                                        const DualBasis &dual);

struct ContactDof {
  int sep;          // separated dof index (tangential jump rate)
  int fault;
  int node;         // index along the bottom trace
  int vertex;       // global vertex id
  Frame frame;
  double weight;    // integral of the bottom hat function over the contact zone
};

// Separated coordinates: two nodal dofs for every free vertex that is not a
// contact node, one tangential jump dof per contact node, in vertex order.
struct JumpBasisTransform {
  int num_sep = 0;
  int num_nodal = 0;  // 2 * free vertices
  CsrMatrix to_nodal;  // num_nodal x num_sep
  CsrMatrix to_sep;    // num_sep x num_nodal
  std::vector<ContactDof> contacts;
  std::vector<int> sep_of_vertex;  // per free vertex: first sep dof
  std::vector<int> block_start;    // per block (free vertex): first sep dof, plus end
  // per fault, per bottom node: index into contacts or -1
  std::vector<std::vector<int>> contact_of_node;
  // per fault, per bottom node: weak jump weights
  std::vector<std::vector<std::vector<WeightEntry>>> weights;
  std::vector<int> free_index;  // per global vertex

  std::vector<double> apply(std::span<const double> sep) const;
  std::vector<double> apply_inverse(std::span<const double> nodal) const;
  std::vector<double> project(std::span<const double> nodal) const;
  // Nodal weak jump at every contact node.
  std::vector<Vec2> jumps(std::span<const double> nodal) const;
};

struct Coupling {
  std::vector<ContactMap> maps;
  std::vector<DualBasis> duals;
  std::vector<std::vector<Frame>> frames;
  JumpBasisTransform transform;
};

JumpBasisTransform build_jump_transform(const std::vector<FaultGeometry> &faults,
                                        const std::vector<ContactMap> &maps,
                                        const std::vector<DualBasis> &duals,
                                        const std::vector<std::vector<Frame>> &frames,
                                        const fem::DofMap &dofs);

Coupling build_coupling(const std::vector<FaultGeometry> &faults, std::span<const Vec2> positions,
                        std::span<const double> u, const fem::DofMap &dofs);

void write_weights(const JumpBasisTransform &t, const std::string &path);

}  // namespace faultsim::mortar

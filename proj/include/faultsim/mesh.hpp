#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "faultsim/geometry.hpp"

namespace faultsim::mesh {

enum class BoundaryKind { dirichlet, neumann, fault_bottom, fault_top };

// fault_bottom: this body lies below interface `interface`; fault_top: above.
struct BoundaryTag {
  BoundaryKind kind = BoundaryKind::neumann;
  int interface = -1;
};

enum Side { bottom = 0, right = 1, top = 2, left = 3 };

struct Rect {
  double x_min, x_max, y_min, y_max;
};

struct SubdomainSpec {
  int id = 0;
  Rect rect{};
  std::array<BoundaryTag, 4> tags{};  // indexed by Side
  std::optional<double> h0;           // overrides the global target size
};

struct BoundaryFace {
  int a, b;
  BoundaryTag tag;
};

// Ordered vertex chain of one body along one interface (increasing x).
struct FaultTrace {
  int interface = -1;
  bool body_is_bottom = true;
  std::vector<int> nodes;
};

struct ParentWeight {
  int vertex;
  double weight;
};

struct Triangulation {
  int body = 0;
  Rect rect{};
  std::array<BoundaryTag, 4> tags{};
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<BoundaryFace> boundary;
  std::vector<FaultTrace> faults;
  // Per vertex: barycentric weights onto the previous level (empty on level 0).
  std::vector<std::vector<ParentWeight>> parents;

  TrianglePoints points(int t) const {
    const auto &v = triangles[t];
    return {vertices[v[0]], vertices[v[1]], vertices[v[2]]};
  }
  const FaultTrace *trace(int interface) const;
  std::vector<bool> boundary_flags(BoundaryKind kind) const;
};

struct Interface {
  int id;
  int bottom_body;
  int top_body;
  Segment segment;
};

struct MeshHierarchy {
  std::vector<std::vector<Triangulation>> levels;  // levels[k][body]
  std::vector<Interface> interfaces;

  int finest() const { return static_cast<int>(levels.size()) - 1; }
  const std::vector<Triangulation> &fine() const { return levels.back(); }
};

struct RefinementOptions {
  double h_min = 0.0625;
  double grading = 80.0;
  int level_cap = 12;
  std::optional<int> max_levels;  // stop early without error
};

void validate(const std::vector<SubdomainSpec> &spec);
std::vector<Interface> interfaces_of(const std::vector<SubdomainSpec> &spec);
std::vector<Triangulation> build_initial_mesh(const std::vector<SubdomainSpec> &spec,
                                              double target_h0);
MeshHierarchy refine_adaptive(const std::vector<Triangulation> &meshes,
                              const std::vector<Interface> &interfaces,
                              const RefinementOptions &opt);
double distance_to_faults(const TrianglePoints &t, const std::vector<Interface> &faults);
// h_T >= (1 + grading * d(T, faults)) * h_min
bool needs_refinement(const TrianglePoints &t, const std::vector<Interface> &faults,
                      const RefinementOptions &opt);

// Rebuilds boundary faces and fault traces from the body rectangle and tags.
void classify_boundary(Triangulation &m);

std::size_t total_vertices(const std::vector<Triangulation> &level);
void write_mesh(const std::vector<Triangulation> &level, const std::string &path);

// Layered stack of rectangles sharing the x-range, Dirichlet at the very
// bottom and very top, Neumann sides, faults between consecutive layers.
std::vector<SubdomainSpec> layered_spec(double x_min, double x_max,
                                        const std::vector<double> &y_levels);

}  // namespace faultsim::mesh

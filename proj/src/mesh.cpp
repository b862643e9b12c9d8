#include "faultsim/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <unordered_map>

#include "faultsim/error.hpp"

namespace faultsim::mesh {

const FaultTrace *Triangulation::trace(int interface) const {
  for (const auto &f : faults)
    if (f.interface == interface) return &f;
  return nullptr;
}

std::vector<bool> Triangulation::boundary_flags(BoundaryKind kind) const {
  std::vector<bool> flag(vertices.size(), false);
  for (const auto &f : boundary)
    if (f.tag.kind == kind) flag[f.a] = flag[f.b] = true;
  return flag;
}

void validate(const std::vector<SubdomainSpec> &spec) {
  if (spec.empty()) throw InvalidSpecError("no subdomains");
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const Rect &r = spec[i].rect;
    if (!(r.x_max > r.x_min) || !(r.y_max > r.y_min))
      throw InvalidSpecError("subdomain " + std::to_string(spec[i].id) + ": degenerate rectangle");
    if (spec[i].h0 && !(*spec[i].h0 > 0))
      throw InvalidSpecError("subdomain " + std::to_string(spec[i].id) + ": h0 must be positive");
  }
  for (std::size_t i = 0; i + 1 < spec.size(); ++i) {
    const Rect &lo = spec[i].rect, &hi = spec[i + 1].rect;
    if (lo.y_max != hi.y_min || lo.x_min != hi.x_min || lo.x_max != hi.x_max)
      throw InvalidSpecError("subdomains " + std::to_string(spec[i].id) + " and " +
                             std::to_string(spec[i + 1].id) +
                             " must share their full horizontal edge");
    const BoundaryTag &a = spec[i].tags[top], &b = spec[i + 1].tags[bottom];
    if (a.kind != BoundaryKind::fault_bottom || b.kind != BoundaryKind::fault_top ||
        a.interface != static_cast<int>(i) || b.interface != static_cast<int>(i))
      throw InvalidSpecError("interface " + std::to_string(i) + " is not tagged as a fault");
  }
  for (std::size_t i = 0; i < spec.size(); ++i)
    for (int s = 0; s < 4; ++s) {
      const BoundaryTag &t = spec[i].tags[s];
      bool fault = t.kind == BoundaryKind::fault_bottom || t.kind == BoundaryKind::fault_top;
      bool expected = (s == top && i + 1 < spec.size()) || (s == bottom && i > 0);
      if (fault != expected)
        throw InvalidSpecError("subdomain " + std::to_string(spec[i].id) +
                               ": fault tag on a side that is not a shared edge");
    }
}

std::vector<Interface> interfaces_of(const std::vector<SubdomainSpec> &spec) {
  std::vector<Interface> out;
  for (std::size_t i = 0; i + 1 < spec.size(); ++i) {
    const Rect &r = spec[i].rect;
    out.push_back({static_cast<int>(i), static_cast<int>(i), static_cast<int>(i + 1),
                   {{r.x_min, r.y_max}, {r.x_max, r.y_max}}});
  }
  return out;
}

std::vector<SubdomainSpec> layered_spec(double x_min, double x_max,
                                        const std::vector<double> &y_levels) {
  std::vector<SubdomainSpec> out;
  const int n = static_cast<int>(y_levels.size()) - 1;
  for (int i = 0; i < n; ++i) {
    SubdomainSpec s;
    s.id = i + 1;
    s.rect = {x_min, x_max, y_levels[i], y_levels[i + 1]};
    s.tags[left] = s.tags[right] = {BoundaryKind::neumann, -1};
    s.tags[bottom] = i == 0 ? BoundaryTag{BoundaryKind::dirichlet, -1}
                            : BoundaryTag{BoundaryKind::fault_top, i - 1};
    s.tags[top] = i == n - 1 ? BoundaryTag{BoundaryKind::dirichlet, -1}
                             : BoundaryTag{BoundaryKind::fault_bottom, i};
    out.push_back(s);
  }
  return out;
}

void classify_boundary(Triangulation &m) {
  const Rect &r = m.rect;
  const double tol = 1e-12 * std::max(r.x_max - r.x_min, r.y_max - r.y_min);
  auto on_side = [&](Vec2 p, int s) {
    switch (s) {
      case bottom: return std::abs(p.y - r.y_min) <= tol;
      case right: return std::abs(p.x - r.x_max) <= tol;
      case top: return std::abs(p.y - r.y_max) <= tol;
      default: return std::abs(p.x - r.x_min) <= tol;
    }
  };

  std::unordered_map<std::uint64_t, int> count;
  const std::uint64_t n = m.vertices.size();
  auto key = [n](int a, int b) {
    return static_cast<std::uint64_t>(std::min(a, b)) * n + std::max(a, b);
  };
  for (const auto &t : m.triangles)
    for (int e = 0; e < 3; ++e) ++count[key(t[e], t[(e + 1) % 3])];

  m.boundary.clear();
  for (const auto &t : m.triangles)
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      if (count[key(a, b)] != 1) continue;
      int side = -1;
      for (int s = 0; s < 4; ++s)
        if (on_side(m.vertices[a], s) && on_side(m.vertices[b], s)) side = s;
      if (side < 0) throw InvalidSpecError("boundary edge off the rectangle boundary");
      m.boundary.push_back({a, b, m.tags[side]});
    }

  m.faults.clear();
  for (int s : {bottom, top}) {
    const BoundaryTag &tag = m.tags[s];
    if (tag.kind != BoundaryKind::fault_bottom && tag.kind != BoundaryKind::fault_top) continue;
    FaultTrace tr;
    tr.interface = tag.interface;
    tr.body_is_bottom = tag.kind == BoundaryKind::fault_bottom;
    for (int v = 0; v < static_cast<int>(m.vertices.size()); ++v)
      if (on_side(m.vertices[v], s)) tr.nodes.push_back(v);
    std::sort(tr.nodes.begin(), tr.nodes.end(),
              [&](int a, int b) { return m.vertices[a].x < m.vertices[b].x; });
    m.faults.push_back(std::move(tr));
  }
}

std::vector<Triangulation> build_initial_mesh(const std::vector<SubdomainSpec> &spec,
                                              double target_h0) {
  if (!(target_h0 > 0)) throw InvalidSpecError("target_h0 must be positive");
  validate(spec);
  std::vector<Triangulation> out;
  for (std::size_t b = 0; b < spec.size(); ++b) {
    const Rect &r = spec[b].rect;
    const double h0 = spec[b].h0.value_or(target_h0);
    const double W = r.x_max - r.x_min, H = r.y_max - r.y_min;
    const int ny = std::max(1, static_cast<int>(std::ceil(H / h0 - 1e-9)));
    const int nx = std::max(1, static_cast<int>(std::lround(W / (H / ny))));
    Triangulation m;
    m.body = static_cast<int>(b);
    m.rect = r;
    m.tags = spec[b].tags;
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        double x = i == nx ? r.x_max : r.x_min + W * i / nx;
        double y = j == ny ? r.y_max : r.y_min + H * j / ny;
        m.vertices.push_back({x, y});
      }
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      }
    m.parents.assign(m.vertices.size(), {});
    classify_boundary(m);
    out.push_back(std::move(m));
  }
  return out;
}

double distance_to_faults(const TrianglePoints &t, const std::vector<Interface> &faults) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto &f : faults) d = std::min(d, triangle_segment_distance(t, f.segment));
  return d;
}

namespace {

struct RedNode {
  std::array<int, 3> v;
  int child = -1;  // first of four children
  int root = -1;   // leaf at the start of the current round this node descends from
};

class RedForest {
 public:
  explicit RedForest(const Triangulation &m) : verts_(m.vertices) {
    for (const auto &t : m.triangles) nodes_.push_back({t, -1, -1});
  }

  const std::vector<Vec2> &vertices() const { return verts_; }
  std::vector<int> leaves() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
      if (nodes_[i].child < 0) out.push_back(i);
    return out;
  }
  const RedNode &node(int i) const { return nodes_[i]; }
  TrianglePoints points(int i) const {
    const auto &v = nodes_[i].v;
    return {verts_[v[0]], verts_[v[1]], verts_[v[2]]};
  }

  void start_round() {
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
      if (nodes_[i].child < 0) nodes_[i].root = i;
    vertex_root_.assign(verts_.size(), -1);
  }

  int midpoint(int a, int b) const {
    auto it = mid_.find(key(a, b));
    return it == mid_.end() ? -1 : it->second;
  }

  void red_refine(int t) {
    std::array<int, 3> v = nodes_[t].v;
    const int root = nodes_[t].root;
    std::array<int, 3> m;
    for (int e = 0; e < 3; ++e) m[e] = get_midpoint(v[e], v[(e + 1) % 3], root);
    const int first = static_cast<int>(nodes_.size());
    nodes_[t].child = first;
    nodes_.push_back({{v[0], m[0], m[2]}, -1, root});
    nodes_.push_back({{m[0], v[1], m[1]}, -1, root});
    nodes_.push_back({{m[2], m[1], v[2]}, -1, root});
    nodes_.push_back({{m[0], m[1], m[2]}, -1, root});
  }

  // Needs red refinement to keep the mesh 1-irregular and green-closable.
  bool needs_closure(int t) const {
    const auto &v = nodes_[t].v;
    int bisected = 0;
    for (int e = 0; e < 3; ++e) {
      int a = v[e], b = v[(e + 1) % 3];
      int m = midpoint(a, b);
      if (m < 0) continue;
      ++bisected;
      if (midpoint(a, m) >= 0 || midpoint(m, b) >= 0) return true;
    }
    return bisected >= 2;
  }

  int vertex_root(int v) const { return v < static_cast<int>(vertex_root_.size()) ? vertex_root_[v] : -1; }

 private:
  static std::uint64_t key(int a, int b) {
    return (static_cast<std::uint64_t>(std::min(a, b)) << 32) |
           static_cast<std::uint32_t>(std::max(a, b));
  }
  int get_midpoint(int a, int b, int root) {
    auto [it, inserted] = mid_.try_emplace(key(a, b), -1);
    if (inserted) {
      it->second = static_cast<int>(verts_.size());
      verts_.push_back(0.5 * (verts_[a] + verts_[b]));
      vertex_root_.push_back(root);
    }
    return it->second;
  }

  std::vector<Vec2> verts_;
  std::vector<RedNode> nodes_;
  std::unordered_map<std::uint64_t, int> mid_;
  std::vector<int> vertex_root_;
};

// Conforming mesh of the current leaves with green closure; leaf_tris maps a
// leaf to the output triangles covering it.
Triangulation conforming(const RedForest &f, const Triangulation &proto,
                         std::unordered_map<int, std::vector<int>> *leaf_tris) {
  Triangulation m;
  m.body = proto.body;
  m.rect = proto.rect;
  m.tags = proto.tags;
  m.vertices = f.vertices();
  for (int leaf : f.leaves()) {
    const auto &v = f.node(leaf).v;
    int edge = -1, mid = -1, count = 0;
    for (int e = 0; e < 3; ++e) {
      int mm = f.midpoint(v[e], v[(e + 1) % 3]);
      if (mm >= 0) {
        edge = e;
        mid = mm;
        ++count;
      }
    }
    if (count > 1) throw RefinementOverflowError("green closure failed: leaf with 2 hanging nodes");
    std::vector<int> ids;
    if (count == 0) {
      ids.push_back(static_cast<int>(m.triangles.size()));
      m.triangles.push_back(v);
    } else {
      int a = v[edge], b = v[(edge + 1) % 3], c = v[(edge + 2) % 3];
      ids.push_back(static_cast<int>(m.triangles.size()));
      m.triangles.push_back({a, mid, c});
      ids.push_back(static_cast<int>(m.triangles.size()));
      m.triangles.push_back({mid, b, c});
    }
    if (leaf_tris) (*leaf_tris)[leaf] = std::move(ids);
  }
  classify_boundary(m);
  return m;
}

}  // namespace

bool needs_refinement(const TrianglePoints &t, const std::vector<Interface> &faults,
                      const RefinementOptions &opt) {
  return diameter(t) >= (1.0 + opt.grading * distance_to_faults(t, faults)) * opt.h_min;
}

MeshHierarchy refine_adaptive(const std::vector<Triangulation> &meshes,
                              const std::vector<Interface> &interfaces,
                              const RefinementOptions &opt) {
  if (!(opt.h_min > 0)) throw InvalidSpecError("h_min must be positive");
  if (!(opt.grading >= 0)) throw InvalidSpecError("grading must be nonnegative");
  MeshHierarchy h;
  h.interfaces = interfaces;
  h.levels.push_back(meshes);
  for (auto &m : h.levels[0]) m.parents.assign(m.vertices.size(), {});

  std::vector<RedForest> forests;
  for (const auto &m : meshes) forests.emplace_back(m);

  for (int round = 1;; ++round) {
    std::vector<std::vector<int>> marked(forests.size());
    bool any = false;
    for (std::size_t b = 0; b < forests.size(); ++b)
      for (int leaf : forests[b].leaves()) {
        TrianglePoints p = forests[b].points(leaf);
        if (needs_refinement(p, interfaces, opt)) marked[b].push_back(leaf);
      }
    for (const auto &mk : marked) any = any || !mk.empty();
    if (!any) break;
    if (opt.max_levels && round > *opt.max_levels) break;
    if (round > opt.level_cap)
      throw RefinementOverflowError("refinement did not terminate within " +
                                    std::to_string(opt.level_cap) + " levels");

    const auto &coarse = h.levels.back();
    std::vector<Triangulation> level;
    for (std::size_t b = 0; b < forests.size(); ++b) {
      RedForest &f = forests[b];
      std::unordered_map<int, std::vector<int>> leaf_tris;
      conforming(f, coarse[b], &leaf_tris);
      const int n_old = static_cast<int>(f.vertices().size());
      f.start_round();
      for (int t : marked[b]) f.red_refine(t);
      for (bool changed = true; changed;) {
        changed = false;
        for (int t : f.leaves())
          if (f.needs_closure(t)) {
            f.red_refine(t);
            changed = true;
          }
      }
      Triangulation fine = conforming(f, coarse[b], nullptr);
      fine.parents.assign(fine.vertices.size(), {});
      for (int v = 0; v < n_old; ++v) fine.parents[v] = {{v, 1.0}};
      for (int v = n_old; v < static_cast<int>(fine.vertices.size()); ++v) {
        const auto &cands = leaf_tris.at(f.vertex_root(v));
        double best = -std::numeric_limits<double>::infinity();
        std::array<double, 3> w{};
        int tri = -1;
        for (int c : cands) {
          auto l = barycentric(fine.vertices[v], coarse[b].points(c));
          double mn = std::min({l[0], l[1], l[2]});
          if (mn > best) {
            best = mn;
            w = l;
            tri = c;
          }
        }
        double sum = 0.0;
        for (double &x : w) {
          if (x < 1e-14) x = 0.0;
          sum += x;
        }
        for (int i = 0; i < 3; ++i)
          if (w[i] > 0) fine.parents[v].push_back({coarse[b].triangles[tri][i], w[i] / sum});
      }
      level.push_back(std::move(fine));
    }
    h.levels.push_back(std::move(level));
  }
  return h;
}

std::size_t total_vertices(const std::vector<Triangulation> &level) {
  std::size_t n = 0;
  for (const auto &m : level) n += m.vertices.size();
  return n;
}

void write_mesh(const std::vector<Triangulation> &level, const std::string &path) {
  std::ofstream out(path);
  out.precision(17);
  int offset = 0;
  for (const auto &m : level) {
    for (const auto &p : m.vertices) out << "v " << p.x << ' ' << p.y << '\n';
  }
  for (const auto &m : level) {
    for (const auto &t : m.triangles)
      out << "t " << t[0] + offset << ' ' << t[1] + offset << ' ' << t[2] + offset << ' '
          << m.body + 1 << '\n';
    for (const auto &f : m.faults)
      for (std::size_t i = 0; i + 1 < f.nodes.size(); ++i)
        out << "f " << f.nodes[i] + offset << ' ' << f.nodes[i + 1] + offset << ' '
            << f.interface << '\n';
    offset += static_cast<int>(m.vertices.size());
  }
}

}  // namespace faultsim::mesh

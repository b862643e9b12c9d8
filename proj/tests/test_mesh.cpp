#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>

#include "faultsim/error.hpp"
#include "faultsim/mesh.hpp"

using namespace faultsim;
using namespace faultsim::mesh;

namespace {

const std::vector<double> kSpringSlider{-1.0, 0.0, 1.0};
const std::vector<double> kLayered{-1.345, -0.345, -0.045, 0.045, 0.345, 1.345};

MeshHierarchy hierarchy(const std::vector<double> &ys, RefinementOptions opt = {}) {
  auto spec = layered_spec(-2.5, 2.5, ys);
  return refine_adaptive(build_initial_mesh(spec, 1.0), interfaces_of(spec), opt);
}

double fault_length(const Triangulation &m, int interface) {
  const FaultTrace *f = m.trace(interface);
  REQUIRE(f);
  double len = 0;
  for (std::size_t i = 0; i + 1 < f->nodes.size(); ++i)
    len += distance(m.vertices[f->nodes[i]], m.vertices[f->nodes[i + 1]]);
  return len;
}

// Every edge is shared by two triangles or is exactly one boundary face.
void check_conforming(const Triangulation &m) {
  std::map<std::pair<int, int>, int> count;
  for (const auto &t : m.triangles)
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  std::set<std::pair<int, int>> faces;
  for (const auto &f : m.boundary) faces.insert({std::min(f.a, f.b), std::max(f.a, f.b)});
  for (const auto &[e, n] : count) {
    REQUIRE(n <= 2);
    if (n == 1) CHECK(faces.count(e) == 1);
  }
  CHECK(faces.size() == static_cast<std::size_t>(std::count_if(
                            count.begin(), count.end(), [](const auto &kv) { return kv.second == 1; })));
}

}  // namespace

TEST_CASE("unit square with h0 = 1 gives two triangles") {
  auto spec = layered_spec(0.0, 1.0, {0.0, 1.0});
  auto m = build_initial_mesh(spec, 1.0);
  REQUIRE(m.size() == 1);
  CHECK(m[0].triangles.size() == 2);
  CHECK(m[0].vertices.size() == 4);
  for (std::size_t t = 0; t < 2; ++t) CHECK(signed_area(m[0].points(t)) > 0);
}

TEST_CASE("degenerate rectangles are rejected") {
  auto spec = layered_spec(0.0, 1.0, {0.0, 1.0});
  spec[0].rect.x_max = spec[0].rect.x_min;
  CHECK_THROWS_AS(build_initial_mesh(spec, 1.0), InvalidSpecError);
  auto spec2 = layered_spec(0.0, 1.0, {0.0, 1.0});
  CHECK_THROWS_AS(build_initial_mesh(spec2, 0.0), InvalidSpecError);
}

TEST_CASE("spring slider bodies share the fault line") {
  auto spec = layered_spec(-2.5, 2.5, kSpringSlider);
  auto m = build_initial_mesh(spec, 1.0);
  REQUIRE(m.size() == 2);
  auto ifs = interfaces_of(spec);
  REQUIRE(ifs.size() == 1);
  CHECK(ifs[0].segment.a.y == 0.0);
  for (const auto &b : m) {
    const FaultTrace *f = b.trace(0);
    REQUIRE(f);
    for (int v : f->nodes) CHECK(b.vertices[v].y == 0.0);
    CHECK(fault_length(b, 0) == doctest::Approx(5.0).epsilon(1e-12));
  }
  CHECK(m[0].trace(0)->body_is_bottom);
  CHECK_FALSE(m[1].trace(0)->body_is_bottom);
}

TEST_CASE("layered spec has five bodies and four faults") {
  auto spec = layered_spec(-2.5, 2.5, kLayered);
  auto m = build_initial_mesh(spec, 1.0);
  CHECK(m.size() == 5);
  auto ifs = interfaces_of(spec);
  REQUIRE(ifs.size() == 4);
  const double ys[] = {-0.345, -0.045, 0.045, 0.345};
  for (int i = 0; i < 4; ++i) {
    CHECK(ifs[i].segment.a.y == ys[i]);
    CHECK(ifs[i].bottom_body == i);
    CHECK(ifs[i].top_body == i + 1);
  }
}

TEST_CASE("refinement criterion thresholds") {
  std::vector<Interface> fault{{0, 0, 1, {{-2.5, 0}, {2.5, 0}}}};
  RefinementOptions opt;
  // touching the fault, h_T = 10 cm > 6.25 cm
  TrianglePoints near{Vec2{0, 0}, Vec2{0.1, 0}, Vec2{0.05, 0.02}};
  CHECK(diameter(near) == doctest::Approx(0.1));
  CHECK(needs_refinement(near, fault, opt));
  // d = 1 m, h_T = 4 m < 81 * 0.0625 = 5.0625 m
  TrianglePoints far{Vec2{-2, 1}, Vec2{2, 1}, Vec2{0, 1.5}};
  CHECK(distance_to_faults(far, fault) == doctest::Approx(1.0));
  CHECK(diameter(far) == doctest::Approx(4.0));
  CHECK_FALSE(needs_refinement(far, fault, opt));
}

TEST_CASE("distance to faults") {
  std::vector<Interface> fault{{0, 0, 1, {{-2.5, 0}, {2.5, 0}}}};
  CHECK(distance_to_faults({Vec2{0, 0}, Vec2{1, 1}, Vec2{0, 1}}, fault) == 0.0);
  CHECK(distance_to_faults({Vec2{0, 0.5}, Vec2{1, 1}, Vec2{-1, 1}}, fault) == doctest::Approx(0.5));

  // beyond the fault end: compare with sampling of the triangle boundary
  TrianglePoints t{Vec2{3.0, 0.4}, Vec2{4.0, 0.2}, Vec2{3.5, 1.5}};
  double sampled = 1e300;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    double s = 3.0 * k / n;
    int e = static_cast<int>(s);
    double r = s - e;
    Vec2 p = (1 - r) * t[e] + r * t[(e + 1) % 3];
    sampled = std::min(sampled, point_segment_distance(p, fault[0].segment));
  }
  const double exact = distance_to_faults(t, fault);
  CHECK(exact <= sampled + 1e-15);
  CHECK(exact == doctest::Approx(sampled).epsilon(1e-6));
  CHECK(exact == doctest::Approx(distance(Vec2{2.5, 0}, Vec2{3.0, 0.4})));
}

TEST_CASE("spring slider hierarchy") {
  auto h = hierarchy(kSpringSlider);
  CHECK(h.finest() == 5);
  const double count = static_cast<double>(total_vertices(h.fine()));
  CHECK(count >= 0.85 * 1274);
  CHECK(count <= 1.15 * 1274);

  double lo = 1e300, hi = 0;
  for (const auto &b : h.fine())
    for (std::size_t t = 0; t < b.triangles.size(); ++t) {
      lo = std::min(lo, diameter(b.points(t)));
      hi = std::max(hi, diameter(b.points(t)));
    }
  CHECK(lo >= 0.044 / 2);
  CHECK(hi <= 0.708 * 2);
}

TEST_CASE("hierarchy invariants") {
  for (const auto &ys : {kSpringSlider, kLayered}) {
    auto h = hierarchy(ys);
    const int nf = static_cast<int>(ys.size()) - 2;
    for (int k = 0; k <= h.finest(); ++k)
      for (const auto &b : h.levels[k]) {
        check_conforming(b);
        for (std::size_t t = 0; t < b.triangles.size(); ++t) {
          CHECK(signed_area(b.points(t)) > 0);
          CHECK(min_angle_deg(b.points(t)) > 15.0);
        }
        for (int f = 0; f < nf; ++f)
          if (b.trace(f)) CHECK(fault_length(b, f) == doctest::Approx(5.0).epsilon(1e-12));
        if (k == 0) continue;
        const auto &coarse = h.levels[k - 1][b.body];
        for (std::size_t v = 0; v < b.vertices.size(); ++v) {
          double sum = 0;
          Vec2 p{};
          for (const auto &pw : b.parents[v]) {
            CHECK(pw.weight >= -1e-14);
            sum += pw.weight;
            p += pw.weight * coarse.vertices[pw.vertex];
          }
          CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
          CHECK(distance(p, b.vertices[v]) <= 1e-12);
        }
      }
    for (const auto &b : h.fine())
      for (std::size_t t = 0; t < b.triangles.size(); ++t)
        CHECK_FALSE(needs_refinement(b.points(t), h.interfaces, {}));
  }
}

TEST_CASE("layered hierarchy size") {
  auto h = hierarchy(kLayered);
  CHECK(h.finest() == 5);
  const double count = static_cast<double>(total_vertices(h.fine()));
  CHECK(count >= 0.85 * 4057);
  CHECK(count <= 1.15 * 4057);
}

TEST_CASE("zero grading refines uniformly below h_min") {
  RefinementOptions opt;
  opt.h_min = 0.3;
  opt.grading = 0.0;
  auto h = hierarchy(kSpringSlider, opt);
  for (const auto &b : h.fine())
    for (std::size_t t = 0; t < b.triangles.size(); ++t) CHECK(diameter(b.points(t)) < 0.3);
  // uniform red refinement: 4x triangles per level
  for (int k = 1; k <= h.finest(); ++k)
    CHECK(h.levels[k][0].triangles.size() == 4 * h.levels[k - 1][0].triangles.size());
}

TEST_CASE("level cap and early stop") {
  RefinementOptions opt;
  opt.level_cap = 2;
  CHECK_THROWS_AS(hierarchy(kSpringSlider, opt), RefinementOverflowError);
  RefinementOptions k3;
  k3.max_levels = 3;
  auto h = hierarchy(kSpringSlider, k3);
  CHECK(h.finest() == 3);
}

TEST_CASE("non-matching fault traces from per-body h0") {
  auto spec = layered_spec(-2.5, 2.5, kSpringSlider);
  spec[1].h0 = 0.5;
  auto m = build_initial_mesh(spec, 1.0);
  CHECK(m[0].trace(0)->nodes.size() != m[1].trace(0)->nodes.size());
  for (const auto &b : m) CHECK(fault_length(b, 0) == doctest::Approx(5.0));
}

TEST_CASE("mesh dump format") {
  auto spec = layered_spec(-2.5, 2.5, kSpringSlider);
  auto m = build_initial_mesh(spec, 1.0);
  const std::string path = "mesh_dump_test.txt";
  write_mesh(m, path);
  std::ifstream in(path);
  int nv = 0, nt = 0, nf = 0;
  std::string tag;
  std::string line;
  while (std::getline(in, line)) {
    REQUIRE_FALSE(line.empty());
    if (line[0] == 'v') ++nv;
    else if (line[0] == 't') ++nt;
    else if (line[0] == 'f') ++nf;
    else FAIL("unexpected line " << line);
  }
  CHECK(nv == static_cast<int>(total_vertices(m)));
  CHECK(nt == static_cast<int>(m[0].triangles.size() + m[1].triangles.size()));
  CHECK(nf == static_cast<int>(m[0].trace(0)->nodes.size() + m[1].trace(0)->nodes.size() - 2));
  std::remove(path.c_str());
}

#include <doctest.h>

#include <Eigen/Sparse>
#include <cstring>
#include <random>

#include "faultsim/error.hpp"
#include "faultsim/fem.hpp"

using namespace faultsim;
using namespace faultsim::fem;

namespace {

struct Setup {
  mesh::MeshHierarchy h;
  std::vector<DofMap> dofs;
};

Setup spring_slider(mesh::RefinementOptions opt) {
  auto spec = mesh::layered_spec(-2.5, 2.5, {-1.0, 0.0, 1.0});
  Setup s;
  s.h = mesh::refine_adaptive(mesh::build_initial_mesh(spec, 1.0), mesh::interfaces_of(spec), opt);
  for (const auto &l : s.h.levels) s.dofs.push_back(DofMap::build(l));
  return s;
}

Setup levels(int k) {
  mesh::RefinementOptions opt;
  opt.max_levels = k;
  return spring_slider(opt);
}

std::vector<double> field(const Level &level, const DofMap &d, auto f) {
  auto pos = global_positions(level, d);
  std::vector<double> v(2 * pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    Vec2 w = f(pos[i]);
    v[2 * i] = w.x;
    v[2 * i + 1] = w.y;
  }
  return v;
}

}  // namespace

TEST_CASE("constant strain element on the reference triangle") {
  // E = 1, nu = 0: lambda = 0, mu = 1/2
  auto K = element_stiffness({Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}}, 0.0, 0.5);
  const double expected[6][6] = {{0.75, 0.25, -0.5, -0.25, -0.25, 0.0},
                                 {0.25, 0.75, 0.0, -0.25, -0.25, -0.5},
                                 {-0.5, 0.0, 0.5, 0.0, 0.0, 0.0},
                                 {-0.25, -0.25, 0.0, 0.25, 0.25, 0.0},
                                 {-0.25, -0.25, 0.0, 0.25, 0.25, 0.0},
                                 {0.0, -0.5, 0.0, 0.0, 0.0, 0.5}};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(K[i][j] == doctest::Approx(expected[i][j]).epsilon(1e-15));
}

TEST_CASE("P1 element mass") {
  TrianglePoints t{Vec2{0.2, 0.1}, Vec2{1.3, 0.4}, Vec2{0.5, 1.2}};
  const double A = signed_area(t), rho = 5e3;
  auto M = element_mass(t, rho, false);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(M[2 * i][2 * j] == doctest::Approx(rho * A / 12 * (i == j ? 2 : 1)));
      CHECK(M[2 * i][2 * j + 1] == 0.0);
    }
  CHECK_THROWS_AS(element_mass({Vec2{0, 0}, Vec2{1, 0}, Vec2{2, 0}}, 1.0, false), AssemblyError);
}

TEST_CASE("elasticity energies of rigid and uniform strain fields") {
  auto s = levels(2);
  const auto &level = s.h.fine();
  const auto &d = s.dofs.back();
  MaterialParams p;
  auto B = assemble_elasticity(level, d, p);

  auto shift = field(level, d, [](Vec2) { return Vec2{0.3, -0.7}; });
  CHECK(std::abs(static_cast<double>(bilinear(B, shift, shift))) <= 1e-12 * p.E);

  auto stretch = field(level, d, [](Vec2 x) { return Vec2{x.x, 0.0}; });
  const double expected = (p.lame_lambda() + 2 * p.lame_mu()) * 10.0;
  CHECK(static_cast<double>(bilinear(B, stretch, stretch)) == doctest::Approx(expected).epsilon(1e-12));

  // symmetry
  for (int i = 0; i < B.rows; ++i)
    for (int k = B.row_ptr[i]; k < B.row_ptr[i + 1]; ++k)
      CHECK(std::abs(B.val[k] - B.at(B.col[k], i)) <= 1e-10 * p.E);
}

TEST_CASE("viscosity is c_A times elasticity") {
  auto s = levels(1);
  MaterialParams p;
  auto B = assemble_elasticity(s.h.fine(), s.dofs.back(), p);
  for (double cA : {0.0, 1.0, 1e-3, 0.37}) {
    p.c_A = cA;
    auto A = assemble_viscosity(s.h.fine(), s.dofs.back(), p);
    REQUIRE(A.same_pattern(B));
    for (std::size_t k = 0; k < A.val.size(); ++k)
      CHECK(std::abs(A.val[k] - cA * B.val[k]) <= 1e-14 * std::abs(cA * B.val[k]));
  }
}

TEST_CASE("mass and load resultants on the spring slider") {
  auto s = levels(2);
  const auto &level = s.h.fine();
  const auto &d = s.dofs.back();
  MaterialParams p;
  auto M = assemble_mass(level, d, p);
  auto ex = field(level, d, [](Vec2) { return Vec2{1, 0}; });
  auto ey = field(level, d, [](Vec2) { return Vec2{0, 1}; });
  CHECK(static_cast<double>(bilinear(M, ex, ex)) == doctest::Approx(5e4).epsilon(1e-12));
  CHECK(static_cast<double>(bilinear(M, ey, ey)) == doctest::Approx(5e4).epsilon(1e-12));
  CHECK(std::abs(static_cast<double>(bilinear(M, ex, ey))) <= 1e-9);

  p.lumped_mass = true;
  auto Ml = assemble_mass(level, d, p);
  CHECK(static_cast<double>(bilinear(Ml, ex, ex)) == doctest::Approx(5e4).epsilon(1e-12));

  auto l = assemble_load(level, d, p);
  double fx = 0, fy = 0;
  for (std::size_t i = 0; i < l.size(); i += 2) {
    fx += l[i];
    fy += l[i + 1];
  }
  CHECK(std::abs(fx) <= 1e-9);
  CHECK(fy == doctest::Approx(-4.905e5).epsilon(1e-12));

  p.g = 0.0;
  for (double v : assemble_load(level, d, p)) CHECK(v == 0.0);
}

TEST_CASE("a_n and l_n composition") {
  auto s = levels(1);
  const auto &level = s.h.fine();
  const auto &d = s.dofs.back();
  MaterialParams p;
  auto M = assemble_mass(level, d, p), A = assemble_viscosity(level, d, p),
       B = assemble_elasticity(level, d, p);
  const double tau = 0.1;
  auto an = compose_an(M, A, B, tau);
  for (std::size_t k = 0; k < an.val.size(); ++k)
    CHECK(an.val[k] == doctest::Approx(2 / tau * M.val[k] + A.val[k] + tau / 2 * B.val[k]));

  CsrMatrix Z = M;
  std::fill(Z.val.begin(), Z.val.end(), 0.0);
  auto only_a = compose_an(Z, A, Z, tau);
  for (std::size_t k = 0; k < A.val.size(); ++k) CHECK(only_a.val[k] == A.val[k]);

  const std::size_t n = M.rows;
  std::vector<double> zero(n, 0.0);
  for (double v : compose_ln(M, B, zero, zero, zero, zero, tau)) CHECK(v == 0.0);

  // dense oracle
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1e-3, 1e-3);
  std::vector<double> load(n), u0(n), u1(n), u2(n);
  for (std::size_t i = 0; i < n; ++i) {
    load[i] = u(rng) * 1e3;
    u0[i] = u(rng);
    u1[i] = u(rng);
    u2[i] = u(rng);
  }
  auto ln = compose_ln(M, B, load, u0, u1, u2, tau);
  for (std::size_t i = 0; i < n; ++i) {
    long double e = load[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double m = M.at(i, j), b = B.at(i, j);
      e += m * u2[j] + 2 / tau * m * u1[j] - tau / 2 * b * u1[j] - b * u0[j];
    }
    CHECK(ln[i] == doctest::Approx(static_cast<double>(e)).epsilon(1e-9).scale(1e3));
  }
}

TEST_CASE("a_n is positive definite on free dofs") {
  auto s = levels(1);
  REQUIRE(s.dofs.back().num_vertices() <= 500);
  MaterialParams p;
  const auto &level = s.h.fine();
  const auto &d = s.dofs.back();
  auto M = assemble_mass(level, d, p), A = assemble_viscosity(level, d, p),
       B = assemble_elasticity(level, d, p);
  for (double tau : {1e-9, 1e-4, 1.0, 60.0}) {
    auto fb = FreeBlock::build(compose_an(M, A, B, tau), d);
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < fb.matrix.rows; ++i)
      for (int k = fb.matrix.row_ptr[i]; k < fb.matrix.row_ptr[i + 1]; ++k)
        t.emplace_back(i, fb.matrix.col[k], fb.matrix.val[k]);
    Eigen::SparseMatrix<double> m(fb.matrix.rows, fb.matrix.cols);
    m.setFromTriplets(t.begin(), t.end());
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(m);
    CHECK(llt.info() == Eigen::Success);
  }
}

TEST_CASE("dirichlet vertices are the outer horizontal sides") {
  auto s = levels(0);
  const auto &d = s.dofs[0];
  auto pos = global_positions(s.h.levels[0], d);
  for (int v : d.dirichlet_vertices) CHECK(std::abs(std::abs(pos[v].y) - 1.0) < 1e-14);
  for (int v : d.free_vertices) CHECK(std::abs(pos[v].y) < 1.0 - 1e-14);
}

TEST_CASE("prolongation interpolates linear fields") {
  auto s = levels(3);
  // per body linear, zero on the Dirichlet side
  auto free = [&](int lev) {
    const auto &d = s.dofs[lev];
    auto pos = global_positions(s.h.levels[lev], d);
    std::vector<double> out;
    for (int v : d.free_vertices) {
      const Vec2 x = pos[v];
      if (v < d.offset[1]) {
        out.push_back(0.3 * (x.y + 1));
        out.push_back(0.7 * (x.y + 1));
      } else {
        out.push_back(-0.4 * (1 - x.y));
        out.push_back(0.2 * (1 - x.y));
      }
    }
    return out;
  };
  for (int k = 1; k <= s.h.finest(); ++k) {
    auto P = prolongation(s.h.levels[k - 1], s.dofs[k - 1], s.h.levels[k], s.dofs[k]);
    auto c = free(k - 1), f = free(k);
    std::vector<double> pf(f.size());
    spmv(P, c, pf);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(pf[i] == doctest::Approx(f[i]).epsilon(1e-12));
  }
}

TEST_CASE("galerkin coarse operator equals rediscretisation on nested meshes") {
  mesh::RefinementOptions opt;
  opt.h_min = 0.3;
  opt.grading = 0.0;
  auto s = spring_slider(opt);
  REQUIRE(s.h.finest() >= 2);
  MaterialParams p;
  for (int k = 1; k <= s.h.finest(); ++k) {
    auto P = prolongation(s.h.levels[k - 1], s.dofs[k - 1], s.h.levels[k], s.dofs[k]);
    auto Bf = FreeBlock::build(assemble_elasticity(s.h.levels[k], s.dofs[k], p), s.dofs[k]).matrix;
    auto Bc = FreeBlock::build(assemble_elasticity(s.h.levels[k - 1], s.dofs[k - 1], p), s.dofs[k - 1]).matrix;
    TripleProduct plan(P, Bf);
    CsrMatrix G;
    plan.compute(P, Bf, {}, G);
    double scale = 0;
    for (double v : Bc.val) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < G.rows; ++i)
      for (int kk = G.row_ptr[i]; kk < G.row_ptr[i + 1]; ++kk)
        CHECK(std::abs(G.val[kk] - Bc.at(i, G.col[kk])) <= 1e-10 * scale);
  }
}

TEST_CASE("parallel assembly is bitwise identical") {
  auto s = levels(3);
  MaterialParams p;
  auto a = assemble_elasticity(s.h.fine(), s.dofs.back(), p, Exec::serial);
  auto b = assemble_elasticity(s.h.fine(), s.dofs.back(), p, Exec::parallel);
  REQUIRE(a.same_pattern(b));
  CHECK(std::memcmp(a.val.data(), b.val.data(), a.val.size() * sizeof(double)) == 0);
  auto m1 = assemble_mass(s.h.fine(), s.dofs.back(), p, Exec::serial);
  auto m2 = assemble_mass(s.h.fine(), s.dofs.back(), p, Exec::parallel);
  CHECK(std::memcmp(m1.val.data(), m2.val.data(), m1.val.size() * sizeof(double)) == 0);
}

#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "faultsim/sparse.hpp"

using namespace faultsim;

namespace {

using Dense = std::vector<std::vector<double>>;

Dense dense(const CsrMatrix &a) {
  Dense d(a.rows, std::vector<double>(a.cols, 0.0));
  for (int i = 0; i < a.rows; ++i)
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) d[i][a.col[k]] += a.val[k];
  return d;
}

CsrMatrix random_sparse(int rows, int cols, double fill, std::mt19937 &rng) {
  std::uniform_real_distribution<double> u(-1, 1), p(0, 1);
  std::vector<Triplet> t;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (p(rng) < fill) t.push_back({i, j, u(rng)});
  return csr_from_triplets(rows, cols, t);
}

bool bitwise_equal(const std::vector<double> &a, const std::vector<double> &b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("triplets are summed and sorted") {
  auto a = csr_from_triplets(2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 2, 3.0}, {1, 0, 0.0}});
  CHECK(a.nnz() == 3);
  CHECK(a.at(1, 2) == 4.0);
  CHECK(a.at(0, 1) == 2.0);
  CHECK(a.find(1, 0) >= 0);  // explicit zero kept
  CHECK(a.find(0, 0) == -1);
  CHECK(a.col[a.row_ptr[1]] == 0);
}

TEST_CASE("transpose and multiply match dense arithmetic") {
  std::mt19937 rng(7);
  auto a = random_sparse(9, 6, 0.3, rng);
  auto b = random_sparse(6, 8, 0.3, rng);
  auto at = dense(transpose(a));
  auto ad = dense(a), bd = dense(b);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 6; ++j) CHECK(at[j][i] == ad[i][j]);
  auto c = dense(multiply(a, b));
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 8; ++j) {
      double s = 0;
      for (int k = 0; k < 6; ++k) s += ad[i][k] * bd[k][j];
      CHECK(c[i][j] == doctest::Approx(s).epsilon(1e-14));
    }
}

TEST_CASE("galerkin product against dense, with masking") {
  std::mt19937 rng(11);
  auto a = random_sparse(12, 12, 0.35, rng);
  auto p = random_sparse(12, 5, 0.4, rng);
  TripleProduct plan(p, a);
  std::vector<std::uint8_t> mask(12, 0);
  mask[3] = mask[8] = 1;
  CsrMatrix c;
  plan.compute(p, a, mask, c);
  auto ad = dense(a), pd = dense(p), cd = dense(c);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      double s = 0;
      for (int k = 0; k < 12; ++k)
        for (int l = 0; l < 12; ++l)
          if (!mask[k] && !mask[l]) s += pd[k][i] * ad[k][l] * pd[l][j];
      CHECK(cd[i][j] == doctest::Approx(s).epsilon(1e-13));
    }

  // values change, pattern does not: plan reused
  for (auto &v : a.val) v *= 2.0;
  CHECK(plan.matches(p, a));
  CsrMatrix c2;
  plan.compute(p, a, {}, c2);
  CHECK(c2.same_pattern(c));
}

TEST_CASE("parallel kernels are bitwise identical to serial") {
  std::mt19937 rng(3);
  auto a = random_sparse(400, 400, 0.05, rng);
  auto p = random_sparse(400, 90, 0.03, rng);
  std::vector<double> x(400), b(400);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto &v : x) v = u(rng);
  for (auto &v : b) v = u(rng);

  std::vector<double> ys(400), yp(400);
  spmv(a, x, ys, Exec::serial);
  spmv(a, x, yp, Exec::parallel);
  CHECK(bitwise_equal(ys, yp));
  residual(a, x, b, ys, Exec::serial);
  residual(a, x, b, yp, Exec::parallel);
  CHECK(bitwise_equal(ys, yp));

  TripleProduct plan(p, a);
  CsrMatrix cs, cp;
  plan.compute(p, a, {}, cs, Exec::serial);
  plan.compute(p, a, {}, cp, Exec::parallel);
  CHECK(cs.same_pattern(cp));
  CHECK(bitwise_equal(cs.val, cp.val));
}

TEST_CASE("bilinear form") {
  auto a = csr_from_triplets(2, 2, {{0, 0, 2}, {0, 1, 1}, {1, 0, 1}, {1, 1, 3}});
  std::vector<double> x{1, 2}, y{3, -1};
  CHECK(static_cast<double>(bilinear(a, x, y)) == doctest::Approx(2 * 3 - 1 + 6 - 6));
}

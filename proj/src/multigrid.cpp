#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "faultsim/error.hpp"
#include "faultsim/solver.hpp"

namespace faultsim::solver {

struct Multigrid::Dense {
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
};

void Multigrid::set_hierarchy(std::vector<const CsrMatrix *> transfers,
                              std::vector<std::vector<int>> block_starts) {
  if (block_starts.size() != transfers.size() + 1)
    throw ConvergenceError("multigrid: one block layout per level expected");
  transfers_ = std::move(transfers);
  blocks_ = std::move(block_starts);
  const std::size_t nl = transfers_.size() + 1;
  ops_.assign(nl, CsrMatrix{});
  if (plans_.size() != transfers_.size()) plans_.assign(transfers_.size(), TripleProduct{});
  inv_.assign(nl, {});
  paired_.assign(nl, {});
}

void Multigrid::set_operator(const CsrMatrix &fine, std::span<const std::uint8_t> fine_mask,
                             Exec exec, bool coarse) {
  const int L = static_cast<int>(transfers_.size());
  mask_.assign(fine_mask.begin(), fine_mask.end());
  if (!coarse && L > 0 && !ops_[0].row_ptr.empty()) {
    std::copy(fine.val.begin(), fine.val.end(), ops_[L].val.begin());
    invert_blocks(L);
    return;
  }
  ops_[L] = fine;
  for (int l = L - 1; l >= 0; --l) {
    const CsrMatrix &P = *transfers_[l];
    const CsrMatrix &A = ops_[l + 1];
    if (!plans_[l].matches(P, A)) plans_[l] = TripleProduct(P, A);
    std::span<const std::uint8_t> m = l == L - 1 ? std::span<const std::uint8_t>(mask_)
                                                 : std::span<const std::uint8_t>();
    plans_[l].compute(P, A, m, ops_[l], exec);
  }
  for (int l = 1; l <= L; ++l) invert_blocks(l);
  factor_coarsest();
}

void Multigrid::invert_blocks(int l) {
  {
    const CsrMatrix &A = ops_[l];
    const auto &blk = blocks_[l];
    auto &inv = inv_[l];
    inv.resize(blk.size() - 1);
    auto &paired = paired_[l];
    paired.assign(blk.size() - 1, 0);
    for (std::size_t b = 0; b + 1 < blk.size(); ++b) {
      const int s = blk[b];
      if (blk[b + 1] - s == 1) {
        inv[b] = {1.0 / A.at(s, s), 0, 0, 0};
        continue;
      }
      const int k0 = A.row_ptr[s], k1 = A.row_ptr[s + 1], k2 = A.row_ptr[s + 2];
      paired[b] = k1 - k0 == k2 - k1 && std::equal(A.col.begin() + k0, A.col.begin() + k1, A.col.begin() + k1);
      const double a00 = A.at(s, s), a01 = A.at(s, s + 1), a10 = A.at(s + 1, s), a11 = A.at(s + 1, s + 1);
      const double det = a00 * a11 - a01 * a10;
      inv[b] = {a11 / det, -a01 / det, -a10 / det, a00 / det};
    }
  }
}

void Multigrid::factor_coarsest() {
  const CsrMatrix &A = ops_[0];
  const bool masked = transfers_.empty() && !mask_.empty();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(A.rows, A.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
      const int j = A.col[k];
      if (masked && (mask_[i] || mask_[j])) continue;
      D(i, j) = A.val[k];
    }
  if (masked)
    for (int i = 0; i < A.rows; ++i)
      if (mask_[i]) D(i, i) = 1.0;
  // Coarse dofs not touched by any retained fine dof.
  for (int i = 0; i < A.rows; ++i)
    if (D(i, i) == 0.0) D(i, i) = 1.0;
  if (!coarse_) coarse_ = std::make_shared<Dense>();
  coarse_->ldlt.compute(D);
}

void Multigrid::solve_coarsest(std::span<double> x, std::span<const double> b) const {
  const CsrMatrix &A = ops_[0];
  const bool masked = transfers_.empty() && !mask_.empty();
  Eigen::VectorXd r(A.rows);
  for (int i = 0; i < A.rows; ++i) {
    double s = b[i];
    for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) s -= A.val[k] * x[A.col[k]];
    r(i) = masked && mask_[i] ? 0.0 : s;
  }
  Eigen::VectorXd d = coarse_->ldlt.solve(r);
  for (int i = 0; i < A.rows; ++i)
    if (!(masked && mask_[i])) x[i] += d(i);
}

void Multigrid::smooth(int l, std::span<double> x, std::span<const double> b, bool forward,
                       double damping) const {
  const CsrMatrix &A = ops_[l];
  const auto &blk = blocks_[l];
  const bool masked = l == static_cast<int>(transfers_.size()) && !mask_.empty();
  const int nb = static_cast<int>(blk.size()) - 1;
  for (int t = 0; t < nb; ++t) {
    const int bi = forward ? t : nb - 1 - t;
    const int s = blk[bi];
    const int size = blk[bi + 1] - s;
    if (masked && mask_[s]) continue;
    double r[2] = {0.0, 0.0};
    if (paired_[l][bi]) {
      // both rows of the block share one column pattern
      const int k0 = A.row_ptr[s], k1 = A.row_ptr[s + 1], len = k1 - k0;
      const double *v0 = A.val.data() + k0, *v1 = A.val.data() + k1;
      const int *c = A.col.data() + k0;
      double acc0 = b[s], acc1 = b[s + 1];
      for (int k = 0; k < len; ++k) {
        const double xc = x[c[k]];
        acc0 -= v0[k] * xc;
        acc1 -= v1[k] * xc;
      }
      r[0] = acc0;
      r[1] = acc1;
    } else {
      for (int i = 0; i < size; ++i) {
        double acc = b[s + i];
        for (int k = A.row_ptr[s + i]; k < A.row_ptr[s + i + 1]; ++k) acc -= A.val[k] * x[A.col[k]];
        r[i] = acc;
      }
    }
    const auto &m = inv_[l][bi];
    if (size == 1) {
      x[s] += damping * m[0] * r[0];
      continue;
    }
    x[s] += damping * (m[0] * r[0] + m[1] * r[1]);
    x[s + 1] += damping * (m[2] * r[0] + m[3] * r[1]);
  }
}

void Multigrid::cycle(int l, std::span<double> x, std::span<const double> b, int pre, int post,
                      double damping) const {
  if (l == 0) {
    solve_coarsest(x, b);
    return;
  }
  const CsrMatrix &A = ops_[l];
  const CsrMatrix &P = *transfers_[l - 1];
  const bool masked = l == static_cast<int>(transfers_.size()) && !mask_.empty();
  for (int k = 0; k < pre; ++k) smooth(l, x, b, true, damping);
  std::vector<double> r(A.rows);
  residual(A, x, b, r);
  if (masked)
    for (int i = 0; i < A.rows; ++i)
      if (mask_[i]) r[i] = 0.0;
  std::vector<double> rc(P.cols, 0.0), xc(P.cols, 0.0);
  for (int i = 0; i < P.rows; ++i)
    for (int k = P.row_ptr[i]; k < P.row_ptr[i + 1]; ++k) rc[P.col[k]] += P.val[k] * r[i];
  cycle(l - 1, xc, rc, pre, post, damping);
  for (int i = 0; i < P.rows; ++i) {
    if (masked && mask_[i]) continue;
    double s = 0.0;
    for (int k = P.row_ptr[i]; k < P.row_ptr[i + 1]; ++k) s += P.val[k] * xc[P.col[k]];
    x[i] += s;
  }
  for (int k = 0; k < post; ++k) smooth(l, x, b, false, damping);
}

void Multigrid::vcycle(std::span<double> x, std::span<const double> b, int pre, int post,
                       double damping) const {
  cycle(static_cast<int>(transfers_.size()), x, b, pre, post, damping);
}

}  // namespace faultsim::solver

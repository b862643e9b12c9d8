#include "faultsim/sparse.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace faultsim {

int CsrMatrix::find(int r, int c) const {
  auto first = col.begin() + row_ptr[r];
  auto last = col.begin() + row_ptr[r + 1];
  auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return -1;
  return static_cast<int>(it - col.begin());
}

double CsrMatrix::at(int r, int c) const {
  int k = find(r, c);
  return k < 0 ? 0.0 : val[k];
}

bool CsrMatrix::same_pattern(const CsrMatrix &o) const {
  return rows == o.rows && cols == o.cols && row_ptr == o.row_ptr && col == o.col;
}

CsrMatrix csr_from_triplets(int rows, int cols, std::vector<Triplet> t) {
  std::stable_sort(t.begin(), t.end(), [](const Triplet &a, const Triplet &b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(rows + 1, 0);
  for (std::size_t k = 0; k < t.size();) {
    std::size_t e = k;
    double sum = 0.0;
    while (e < t.size() && t[e].row == t[k].row && t[e].col == t[k].col) sum += t[e++].value;
    if (t[k].row < 0 || t[k].row >= rows || t[k].col < 0 || t[k].col >= cols)
      throw std::out_of_range("csr_from_triplets: index out of range");
    m.col.push_back(t[k].col);
    m.val.push_back(sum);
    ++m.row_ptr[t[k].row + 1];
    k = e;
  }
  std::partial_sum(m.row_ptr.begin(), m.row_ptr.end(), m.row_ptr.begin());
  return m;
}

CsrMatrix transpose(const CsrMatrix &a) {
  CsrMatrix t;
  t.rows = a.cols;
  t.cols = a.rows;
  t.row_ptr.assign(a.cols + 1, 0);
  for (int c : a.col) ++t.row_ptr[c + 1];
  std::partial_sum(t.row_ptr.begin(), t.row_ptr.end(), t.row_ptr.begin());
  t.col.resize(a.col.size());
  t.val.resize(a.val.size());
  std::vector<int> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (int r = 0; r < a.rows; ++r)
    for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      int pos = next[a.col[k]]++;
      t.col[pos] = r;
      t.val[pos] = a.val[k];
    }
  return t;
}

CsrMatrix multiply(const CsrMatrix &a, const CsrMatrix &b) {
  if (a.cols != b.rows) throw std::invalid_argument("multiply: dimension mismatch");
  CsrMatrix c;
  c.rows = a.rows;
  c.cols = b.cols;
  c.row_ptr.assign(a.rows + 1, 0);
  std::vector<int> marker(b.cols, -1);
  std::vector<double> acc(b.cols, 0.0);
  std::vector<int> cols;
  for (int r = 0; r < a.rows; ++r) {
    cols.clear();
    for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      int m = a.col[k];
      for (int l = b.row_ptr[m]; l < b.row_ptr[m + 1]; ++l) {
        int j = b.col[l];
        if (marker[j] != r) {
          marker[j] = r;
          acc[j] = 0.0;
          cols.push_back(j);
        }
        acc[j] += a.val[k] * b.val[l];
      }
    }
    std::sort(cols.begin(), cols.end());
    for (int j : cols) {
      c.col.push_back(j);
      c.val.push_back(acc[j]);
    }
    c.row_ptr[r + 1] = static_cast<int>(c.col.size());
  }
  return c;
}

CsrMatrix identity(int n) {
  CsrMatrix m;
  m.rows = m.cols = n;
  m.row_ptr.resize(n + 1);
  std::iota(m.row_ptr.begin(), m.row_ptr.end(), 0);
  m.col.resize(n);
  std::iota(m.col.begin(), m.col.end(), 0);
  m.val.assign(n, 1.0);
  return m;
}

void spmv(const CsrMatrix &a, std::span<const double> x, std::span<double> y, Exec exec) {
  const int n = a.rows;
  const int *rp = a.row_ptr.data();
  const int *ci = a.col.data();
  const double *v = a.val.data();
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < n; ++r) {
      double s = 0.0;
      for (int k = rp[r]; k < rp[r + 1]; ++k) s += v[k] * x[ci[k]];
      y[r] = s;
    }
    return;
  }
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (int k = rp[r]; k < rp[r + 1]; ++k) s += v[k] * x[ci[k]];
    y[r] = s;
  }
}

void residual(const CsrMatrix &a, std::span<const double> x, std::span<const double> b,
              std::span<double> y, Exec exec) {
  const int n = a.rows;
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < n; ++r) {
      double s = b[r];
      for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) s -= a.val[k] * x[a.col[k]];
      y[r] = s;
    }
    return;
  }
  for (int r = 0; r < n; ++r) {
    double s = b[r];
    for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) s -= a.val[k] * x[a.col[k]];
    y[r] = s;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

long double bilinear(const CsrMatrix &a, std::span<const double> x, std::span<const double> y) {
  long double s = 0.0L;
  for (int r = 0; r < a.rows; ++r) {
    long double row = 0.0L;
    for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
      row += static_cast<long double>(a.val[k]) * y[a.col[k]];
    s += row * x[r];
  }
  return s;
}

TripleProduct::TripleProduct(const CsrMatrix &p, const CsrMatrix &a) {
  if (p.rows != a.rows || a.rows != a.cols)
    throw std::invalid_argument("TripleProduct: dimension mismatch");
  p_rowptr_ = p.row_ptr;
  p_col_ = p.col;
  a_rowptr_ = a.row_ptr;
  a_col_ = a.col;

  struct Term {
    long long key;
    int a_pos, p1, p2, ar, ac;
  };
  std::vector<Term> terms;
  const long long nc = p.cols;
  for (int i = 0; i < a.rows; ++i)
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      int j = a.col[k];
      for (int l1 = p.row_ptr[i]; l1 < p.row_ptr[i + 1]; ++l1)
        for (int l2 = p.row_ptr[j]; l2 < p.row_ptr[j + 1]; ++l2)
          terms.push_back({p.col[l1] * nc + p.col[l2], k, l1, l2, i, j});
    }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term &x, const Term &y) { return x.key < y.key; });

  c_.rows = c_.cols = p.cols;
  c_.row_ptr.assign(p.cols + 1, 0);
  c_term_ptr_.push_back(0);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (t == 0 || terms[t].key != terms[t - 1].key) {
      if (t != 0) c_term_ptr_.push_back(static_cast<int>(t));
      int r = static_cast<int>(terms[t].key / nc);
      c_.col.push_back(static_cast<int>(terms[t].key % nc));
      ++c_.row_ptr[r + 1];
    }
    a_pos_.push_back(terms[t].a_pos);
    p1_pos_.push_back(terms[t].p1);
    p2_pos_.push_back(terms[t].p2);
    a_row_.push_back(terms[t].ar);
    a_col_idx_.push_back(terms[t].ac);
  }
  c_term_ptr_.push_back(static_cast<int>(terms.size()));
  if (terms.empty()) c_term_ptr_ = {0};
  std::partial_sum(c_.row_ptr.begin(), c_.row_ptr.end(), c_.row_ptr.begin());
  c_.val.assign(c_.col.size(), 0.0);
}

bool TripleProduct::matches(const CsrMatrix &p, const CsrMatrix &a) const {
  return p.row_ptr == p_rowptr_ && p.col == p_col_ && a.row_ptr == a_rowptr_ && a.col == a_col_;
}

void TripleProduct::compute(const CsrMatrix &p, const CsrMatrix &a,
                            std::span<const std::uint8_t> mask, CsrMatrix &c,
                            Exec exec) const {
  if (!c.same_pattern(c_)) c = c_;
  const int nentries = static_cast<int>(c_.col.size());
  const bool masked = !mask.empty();
  auto entry = [&](int e) {
    double s = 0.0;
    for (int t = c_term_ptr_[e]; t < c_term_ptr_[e + 1]; ++t) {
      if (masked && (mask[a_row_[t]] || mask[a_col_idx_[t]])) continue;
      s += p.val[p1_pos_[t]] * a.val[a_pos_[t]] * p.val[p2_pos_[t]];
    }
    c.val[e] = s;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int e = 0; e < nentries; ++e) entry(e);
    return;
  }
  for (int e = 0; e < nentries; ++e) entry(e);
}

void write_coordinate(const CsrMatrix &a, const std::string &path, int block) {
  std::ofstream out(path);
  out.precision(17);
  const int nb = a.rows / block;
  for (int br = 0; br < nb; ++br) {
    std::vector<int> bcols;
    for (int i = 0; i < block; ++i)
      for (int k = a.row_ptr[br * block + i]; k < a.row_ptr[br * block + i + 1]; ++k)
        bcols.push_back(a.col[k] / block);
    std::sort(bcols.begin(), bcols.end());
    bcols.erase(std::unique(bcols.begin(), bcols.end()), bcols.end());
    for (int bc : bcols) {
      out << br << ' ' << bc;
      for (int i = 0; i < block; ++i)
        for (int j = 0; j < block; ++j) out << ' ' << a.at(br * block + i, bc * block + j);
      out << '\n';
    }
  }
}

}  // namespace faultsim

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace faultsim {

// Serial kernels are the reference; parallel ones must give bitwise identical
// results (each output entry is reduced in the same order).
enum class Exec { serial, parallel };

struct Triplet {
  int row;
  int col;
  double value;
};

struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;

  int nnz() const { return static_cast<int>(col.size()); }
  // Position of (r, c) in val, or -1.
  int find(int r, int c) const;
  double at(int r, int c) const;
  bool same_pattern(const CsrMatrix &o) const;
};

// Duplicates are summed; columns sorted within each row.  Explicit zeros kept.
CsrMatrix csr_from_triplets(int rows, int cols, std::vector<Triplet> t);
CsrMatrix transpose(const CsrMatrix &a);
CsrMatrix multiply(const CsrMatrix &a, const CsrMatrix &b);
CsrMatrix identity(int n);

void spmv(const CsrMatrix &a, std::span<const double> x, std::span<double> y,
          Exec exec = Exec::serial);
// y = b - A x
void residual(const CsrMatrix &a, std::span<const double> x, std::span<const double> b,
              std::span<double> y, Exec exec = Exec::serial);
double dot(std::span<const double> a, std::span<const double> b);
// xᵀ A y accumulated in long double.
long double bilinear(const CsrMatrix &a, std::span<const double> x, std::span<const double> y);

// Galerkin product C = Pᵀ A P with a reusable symbolic phase.  Values of P and
// A may change between calls as long as their patterns do not.  Rows/columns
// of A flagged in `mask` are treated as zero.
class TripleProduct {
 public:
  TripleProduct() = default;
  TripleProduct(const CsrMatrix &p, const CsrMatrix &a);

  bool matches(const CsrMatrix &p, const CsrMatrix &a) const;
  const CsrMatrix &pattern() const { return c_; }
  void compute(const CsrMatrix &p, const CsrMatrix &a, std::span<const std::uint8_t> mask,
               CsrMatrix &c, Exec exec = Exec::serial) const;
  std::size_t terms() const { return a_pos_.size(); }

 private:
  CsrMatrix c_;
  std::vector<int> p_rowptr_, p_col_, a_rowptr_, a_col_;
  // One entry per product term, grouped by output position.
  std::vector<int> a_pos_, p1_pos_, p2_pos_, a_row_, a_col_idx_;
  std::vector<int> c_term_ptr_;
};

void write_coordinate(const CsrMatrix &a, const std::string &path, int block = 2);

}  // namespace faultsim

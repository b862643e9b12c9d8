#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "faultsim/friction.hpp"
#include "faultsim/sparse.hpp"

namespace faultsim::solver {

struct SolverConfig {
  double omega = 0.5;            // fixed-point relaxation
  double fp_tol_factor = 0.1;    // fixed-point tolerance = factor * delta_tau
  double mg_tol = 1e-8;          // a_n-norm of the TNNMG increment
  int vcycles = 5;
  int pre_smooth = 3;
  int post_smooth = 3;
  double smoother_damping = 0.7;
  double state_tol = 1e-12;
  int tnnmg_cap = 200;
  int fp_cap = 100;
  bool scalar_bound_gs = false;  // scalar eigenvalue bound at non-contact nodes
  // Contact dofs whose friction curvature exceeds this multiple of the
  // diagonal are frozen in the linear correction (0 disables).
  double stiff_truncation = 1e8;
  // Galerkin coarse operators are rebuilt only when the truncation mask or a
  // friction curvature moved noticeably since the last build (the finest
  // operator is always current).
  bool reuse_coarse = true;
  Exec exec = Exec::serial;

  void validate() const;
};

// --- state -----------------------------------------------------------------

double solve_state_scalar(const friction::FrictionParams &p, double alpha_prev, double V, double tau,
                          double tol = 1e-12);

// --- rate problem in separated coordinates ----------------------------------

struct ContactTerm {
  int dof;
  friction::RatePotential g;  // nodal weight folded into g.k
};

// J(x) = 1/2 x'Ax - b'x + sum_p g_p(|x_p|) over contact dofs.
struct RateProblem {
  const CsrMatrix *A = nullptr;
  std::vector<double> b;
  std::vector<ContactTerm> contacts;
  std::vector<int> block_start;  // 1- or 2-dof blocks; contact dofs are 1-dof blocks

  // Derived by prepare().
  std::vector<int> contact_of_dof;
  std::vector<int> diag_pos;
  std::vector<int> off_pos;  // (i, i+1) and (i+1, i) per dof i starting a 2-dof block

  void prepare();
  int size() const { return A->rows; }
};

long double energy(const RateProblem &pb, std::span<const double> x);
// Minimiser of 1/2 q s^2 - r s + g(|s|).
double solve_local_contact(double q, double r, const friction::RatePotential &g);
void gs_sweep(const RateProblem &pb, std::span<double> x, bool scalar_bound = false);
double energy_norm(const CsrMatrix &A, std::span<const double> d);

enum class ReferenceStop { increment, stagnation, cap };
struct ReferenceReport {
  int sweeps = 0;
  ReferenceStop stop = ReferenceStop::cap;
  std::vector<long double> energies;
};
ReferenceReport solve_rate_reference(const RateProblem &pb, std::span<double> x,
                                     int max_sweeps = 2000000, double tol = 1e-12);

// --- truncation and line search ---------------------------------------------

struct Truncation {
  std::vector<std::uint8_t> mask;     // per dof, 1 = removed from correction
  std::vector<double> hessian;        // friction curvature added to the diagonal
  int truncated = 0;
};
Truncation truncate(const RateProblem &pb, std::span<const double> x, double stiff_ratio = 0.0);

// Damping rho >= 0 minimising J(x + rho d); J(x + rho d) <= J(x) guaranteed.
double line_search(const RateProblem &pb, std::span<const double> x, std::span<const double> d);

// --- multigrid --------------------------------------------------------------

class Multigrid {
 public:
  // transfers[l] maps level l to level l+1; the last one maps into the fine
  // (separated) space.  block_start per level for the block smoother.
  void set_hierarchy(std::vector<const CsrMatrix *> transfers,
                     std::vector<std::vector<int>> block_starts);
  // coarse = false keeps the coarse operators of the previous call and only
  // replaces the finest one, whose pattern must not have changed.
  void set_operator(const CsrMatrix &fine, std::span<const std::uint8_t> fine_mask,
                    Exec exec = Exec::serial, bool coarse = true);
  void vcycle(std::span<double> x, std::span<const double> b, int pre, int post,
              double damping) const;
  int levels() const { return static_cast<int>(ops_.size()); }
  const CsrMatrix &op(int l) const { return ops_[l]; }

 private:
  struct LevelData;
  void cycle(int l, std::span<double> x, std::span<const double> b, int pre, int post,
             double damping) const;
  void smooth(int l, std::span<double> x, std::span<const double> b, bool forward,
              double damping) const;
  void factor_coarsest();
  void invert_blocks(int l);
  void solve_coarsest(std::span<double> x, std::span<const double> b) const;

  std::vector<const CsrMatrix *> transfers_;
  std::vector<std::vector<int>> blocks_;
  std::vector<CsrMatrix> ops_;
  std::vector<TripleProduct> plans_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::vector<std::array<double, 4>>> inv_;  // inverted diagonal blocks
  std::vector<std::vector<std::uint8_t>> paired_;         // 2-dof blocks with one column pattern
  struct Dense;
  std::shared_ptr<Dense> coarse_;
};

// --- TNNMG -------------------------------------------------------------------

struct TnnmgReport {
  int iterations = 0;
  int vcycles = 0;
  bool converged = false;
  int rejected = 0;  // smoothing/correction candidates discarded for raising energy
  std::vector<long double> energies;  // relative to the start iterate
  std::vector<double> damping;
  std::vector<int> truncated;
};

class Tnnmg {
 public:
  explicit Tnnmg(SolverConfig cfg = {}) : cfg_(cfg) {}
  // Transfers as for Multigrid::set_hierarchy; empty = one-level (direct).
  void set_hierarchy(std::vector<const CsrMatrix *> transfers,
                     std::vector<std::vector<int>> block_starts);
  TnnmgReport solve(const RateProblem &pb, std::span<double> x);
  const SolverConfig &config() const { return cfg_; }

 private:
  SolverConfig cfg_;
  Multigrid mg_;
  std::vector<const CsrMatrix *> transfers_;
  std::vector<std::vector<int>> blocks_;
  CsrMatrix work_;
};

}  // namespace faultsim::solver

#pragma once

#include <string>
#include <vector>

#include "faultsim/model.hpp"
#include "faultsim/mortar.hpp"
#include "faultsim/solver.hpp"
#include "faultsim/state.hpp"

namespace faultsim::solver {

struct StepOptions {
  SolverConfig solver;
  double delta_tau = 1e-5;
  bool update_coupling = true;     // rebuild the contact map from u_{n-1} each step
  bool keep_tnnmg_reports = false;
};

struct StepReport {
  double tau = 0.0;
  bool ok = false;
  std::string failure;
  int fp_iters = 0;
  int mg_iters = 0;  // TNNMG iterations summed over the fixed-point iteration
  int vcycles = 0;
  int energy_violations = 0;  // recorded TNNMG energy increases (expected 0)
  bool non_contraction = false;
  std::vector<double> fp_diffs;
  std::vector<TnnmgReport> tnnmg;
  std::vector<double> mean_slip_rate;  // per fault, weighted by nodal weights
};

struct StepResult {
  stepper::SystemState state;
  StepReport report;
  std::vector<double> slip_rate;  // per state node: |tangential jump rate|, 0 off contact
};

// Accumulated over every step() call, trial steps included.
struct SolveTotals {
  long tnnmg_runs = 0;
  long tnnmg_iterations = 0;
  long energy_violations = 0;
  long rejected = 0;
};

// One time step: the rate/state fixed-point iteration with TNNMG rate solves.
class StepSolver {
 public:
  StepSolver(const Model &model, StepOptions opt);

  StepResult step(const stepper::SystemState &prev, double tau);

  // The separated rate problem of a step with the given state (for oracles).
  RateProblem rate_problem(const stepper::SystemState &prev, double tau,
                           const std::vector<double> &alpha);
  std::vector<double> initial_iterate(const stepper::SystemState &prev);
  Tnnmg &tnnmg() { return tnnmg_; }
  const mortar::Coupling &coupling() const { return coupling_; }
  const StepOptions &options() const { return opt_; }
  const SolveTotals &totals() const { return totals_; }

 private:
  void ensure_coupling(const std::vector<double> &u);
  void assemble(const stepper::SystemState &prev, double tau);
  void set_contacts(RateProblem &pb, const std::vector<double> &alpha) const;

  const Model &model_;
  StepOptions opt_;
  Tnnmg tnnmg_;
  SolveTotals totals_;

  bool have_coupling_ = false;
  std::vector<double> coupling_u_;
  mortar::Coupling coupling_;
  CsrMatrix Q_;
  std::vector<std::vector<int>> blocks_;

  CsrMatrix an_;
  fem::FreeBlock an_free_;
  TripleProduct sep_plan_;
  CsrMatrix an_sep_;
  std::vector<double> b_sep_;
  std::vector<double> wD_;
};

std::vector<double> tmul(const CsrMatrix &a, std::span<const double> x);

}  // namespace faultsim::solver

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "faultsim/config.hpp"
#include "faultsim/events.hpp"
#include "faultsim/fixed_point.hpp"
#include "faultsim/state.hpp"

namespace faultsim::scenario {

struct StepRecord {
  long step = 0;
  double t = 0, tau = 0;
  int fp_iters = 0, mg_iters = 0;
  std::vector<double> mean_rel_vel;  // per fault
  long energy_violations = 0;        // cumulative over all TNNMG runs so far
};

struct FaultSnapshot {
  double t = 0;
  std::vector<double> rel_vel, alpha;
};

struct FaultTrack {
  std::vector<double> x;  // reference coordinates of the non-mortar nodes
  std::vector<FaultSnapshot> snapshots;
};

struct RunOptions {
  std::optional<std::string> resume;      // checkpoint to continue from
  std::optional<std::string> checkpoint;  // default <output dir>/checkpoint.bin
  std::optional<long> max_steps;          // committed steps (may overshoot by one)
  std::optional<double> wall_seconds;     // stop once this much wall time has passed
  bool write_files = true;
  std::function<void(const StepRecord &)> on_step;
};

struct RunOutputs {
  std::vector<StepRecord> records;
  std::vector<FaultTrack> faults;
  std::vector<std::vector<SlipEvent>> events;  // per fault
  solver::SolveTotals totals;
  long solves = 0;
  std::size_t vertices = 0;
  int levels = 0;
  stepper::SystemState final_state;
  bool reached_end = false;
};

// Errors are rethrown with their type kept and the phase and step prefixed.
RunOutputs run_scenario(const ScenarioConfig &config, const RunOptions &options = {});

void write_steps_header(std::FILE *f);
void write_step_rows(std::FILE *f, const StepRecord &r);

}  // namespace faultsim::scenario

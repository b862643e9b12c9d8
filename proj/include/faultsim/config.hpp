#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "faultsim/fem.hpp"
#include "faultsim/friction.hpp"
#include "faultsim/mesh.hpp"
#include "faultsim/model.hpp"
#include "faultsim/solver.hpp"
#include "faultsim/state.hpp"

namespace faultsim::scenario {

struct TimeConfig {
  double delta_tau = 1e-5;
  double tau_min = 1e-9;
  std::optional<double> max_time;  // stop before T0
};

struct OutputConfig {
  std::string directory = "faultsim_out";
  double snapshot_tau = 1e-3;      // snapshot every step while tau is below this
  int snapshot_every = 10;         // otherwise every n-th step
  int checkpoint_every = 0;        // steps; 0 = only at the end
  std::vector<double> contour_levels{1e-5, 1e-4, 1e-3, 1e-2};  // m/s
};

struct ScenarioConfig {
  std::string name = "spring_slider";
  double x_min = -2.5, x_max = 2.5;
  std::vector<double> layers{-1.0, 0.0, 1.0};  // y of the body boundaries, bottom to top
  double h0 = 1.0;
  mesh::RefinementOptions mesh;
  fem::MaterialParams material;
  friction::FrictionParams friction;        // shared by all faults
  std::vector<double> sigma_n;              // per fault; empty = lithostatic
  stepper::LoadingProfile loading;
  double alpha0 = -10.0;
  TimeConfig time;
  solver::SolverConfig solver;
  bool update_coupling = true;
  OutputConfig output;

  int num_faults() const { return static_cast<int>(layers.size()) - 2; }
  void validate() const;
};

nlohmann::json to_json(const ScenarioConfig &c);
// Strict: unknown keys and wrong types raise ConfigError.
ScenarioConfig from_json(const nlohmann::json &j);

ScenarioConfig preset(const std::string &name);
// Preset (default spring_slider) overlaid with the file as a JSON merge patch.
ScenarioConfig load_config(const std::string &path, const std::optional<std::string> &preset_name);

ModelSpec model_spec(const ScenarioConfig &c);

}  // namespace faultsim::scenario

#include "faultsim/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <memory>

#include "faultsim/checkpoint.hpp"
#include "faultsim/error.hpp"
#include "faultsim/log.hpp"
#include "faultsim/stepper.hpp"

namespace faultsim::scenario {

namespace {

using File = std::unique_ptr<std::FILE, int (*)(std::FILE *)>;

File open(const std::filesystem::path &p, const char *mode) {
  File f(std::fopen(p.string().c_str(), mode), std::fclose);
  if (!f) throw ConfigError("cannot open output file " + p.string());
  return f;
}

[[noreturn]] void rethrow_in(const std::string &where) {
  try {
    throw;
  } catch (const ConfigError &e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const InvalidSpecError &e) {
    throw InvalidSpecError(where + ": " + e.what());
  } catch (const RefinementOverflowError &e) {
    throw RefinementOverflowError(where + ": " + e.what());
  } catch (const AssemblyError &e) {
    throw AssemblyError(where + ": " + e.what());
  } catch (const DomainError &e) {
    throw DomainError(where + ": " + e.what());
  } catch (const NoContactError &e) {
    throw NoContactError(where + ": " + e.what());
  } catch (const DegenerateGeometryError &e) {
    throw DegenerateGeometryError(where + ": " + e.what());
  } catch (const ConvergenceError &e) {
    throw ConvergenceError(where + ": " + e.what());
  } catch (const StepFailureError &e) {
    throw StepFailureError(where + ": " + e.what());
  } catch (const Error &e) {
    throw Error(where + ": " + e.what());
  }
}

void write_fault_rows(std::FILE *f, const FaultTrack &track, const FaultSnapshot &s) {
  for (std::size_t i = 0; i < track.x.size(); ++i)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", s.t, track.x[i], s.rel_vel[i], s.alpha[i]);
  std::fflush(f);
}

}  // namespace

void write_steps_header(std::FILE *f) { std::fprintf(f, "t,tau,fp_iters,mg_iters,fault_id,mean_rel_vel\n"); }

void write_step_rows(std::FILE *f, const StepRecord &r) {
  for (std::size_t i = 0; i < r.mean_rel_vel.size(); ++i)
    std::fprintf(f, "%.17g,%.17g,%d,%d,%zu,%.17g\n", r.t, r.tau, r.fp_iters, r.mg_iters, i,
                 r.mean_rel_vel[i]);
}

RunOutputs run_scenario(const ScenarioConfig &config, const RunOptions &options) {
  configure_logging();
  auto log = spdlog::get("faultsim");
  RunOutputs out;

  std::unique_ptr<Model> model;
  try {
    config.validate();
    model = std::make_unique<Model>(model_spec(config));
  } catch (...) {
    rethrow_in("setup (mesh and operators)");
  }
  out.levels = model->levels();
  out.vertices = static_cast<std::size_t>(model->dofs().num_vertices());
  log->info("{}: {} levels, {} vertices on the finest level", config.name, out.levels, out.vertices);

  const int nf = static_cast<int>(model->faults().size());
  for (int f = 0; f < nf; ++f) {
    FaultTrack tr;
    for (int v : model->faults()[f].bottom.nodes) tr.x.push_back(model->positions()[v].x);
    out.faults.push_back(std::move(tr));
  }

  stepper::SystemState state;
  try {
    state = options.resume ? stepper::read_checkpoint(*options.resume) : stepper::initial_state(*model);
  } catch (...) {
    rethrow_in(options.resume ? "resume" : "initial conditions");
  }
  if (state.u.size() != static_cast<std::size_t>(model->num_full()) ||
      state.alpha.size() != static_cast<std::size_t>(model->state_size()))
    throw ConfigError("resume: checkpoint does not match the configured discretisation");

  const std::filesystem::path dir = config.output.directory;
  const std::string ckpt = options.checkpoint.value_or((dir / "checkpoint.bin").string());
  File steps(nullptr, std::fclose);
  std::vector<File> fault_files;
  if (options.write_files) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string());
    const char *mode = options.resume ? "a" : "w";
    steps = open(dir / "steps.csv", mode);
    if (!options.resume) write_steps_header(steps.get());
    for (int f = 0; f < nf; ++f) {
      fault_files.push_back(open(dir / ("fault_" + std::to_string(f) + ".csv"), mode));
      if (!options.resume) std::fprintf(fault_files.back().get(), "t,x,rel_vel,alpha\n");
    }
  }

  auto snapshot = [&](const stepper::SystemState &s, const std::vector<double> &rate) {
    for (int f = 0; f < nf; ++f) {
      FaultSnapshot snap;
      snap.t = s.t;
      const int off = model->state_offset(f), n = static_cast<int>(out.faults[f].x.size());
      snap.rel_vel.assign(rate.begin() + off, rate.begin() + off + n);
      snap.alpha.assign(s.alpha.begin() + off, s.alpha.begin() + off + n);
      if (options.write_files) write_fault_rows(fault_files[f].get(), out.faults[f], snap);
      out.faults[f].snapshots.push_back(std::move(snap));
    }
  };
  auto emit = [&](const StepRecord &r) {
    out.records.push_back(r);
    if (steps) {
      write_step_rows(steps.get(), r);
      std::fflush(steps.get());
    }
    if (options.on_step) options.on_step(r);
  };

  if (!options.resume) {
    StepRecord r0;
    r0.mean_rel_vel.assign(nf, 0.0);
    emit(r0);
    snapshot(state, std::vector<double>(state.alpha.size(), 0.0));
  }

  double t_end = config.loading.T0;
  if (config.time.max_time) t_end = std::min(t_end, *config.time.max_time);

  solver::StepOptions so;
  so.solver = config.solver;
  so.delta_tau = config.time.delta_tau;
  so.update_coupling = config.update_coupling;
  stepper::AdaptiveStepper stepper(*model, so, {config.time.delta_tau, config.time.tau_min, t_end});

  long committed = 0;
  const long start_step = state.step;
  const auto started = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    if (!options.wall_seconds) return false;
    const std::chrono::duration<double> el = std::chrono::steady_clock::now() - started;
    return el.count() >= *options.wall_seconds;
  };
  try {
    while (state.t < t_end) {
      if (options.max_steps && committed >= *options.max_steps) break;
      if (out_of_time()) {
        log->warn("wall time limit reached at t = {:.6f}", state.t);
        break;
      }
      stepper::AdaptiveResult adv;
      try {
        adv = stepper.advance(state);
      } catch (...) {
        rethrow_in("time step " + std::to_string(state.step + 1) + " (t = " + std::to_string(state.t) + ")");
      }
      out.solves += adv.solves;
      if (adv.steps.empty()) break;
      for (auto &res : adv.steps) {
        state = std::move(res.state);
        ++committed;
        StepRecord r;
        r.step = state.step;
        r.t = state.t;
        r.tau = res.report.tau;
        r.fp_iters = res.report.fp_iters;
        r.mg_iters = res.report.mg_iters;
        r.mean_rel_vel = res.report.mean_slip_rate;
        r.energy_violations = stepper.solver().totals().energy_violations;
        emit(r);
        if (r.tau < config.output.snapshot_tau || state.step % config.output.snapshot_every == 0)
          snapshot(state, res.slip_rate);
      }
      if (options.write_files && config.output.checkpoint_every > 0 &&
          (state.step - start_step) / config.output.checkpoint_every !=
              (state.step - start_step - static_cast<long>(adv.steps.size())) /
                  config.output.checkpoint_every)
        stepper::write_checkpoint(state, ckpt);
      if (committed % 1000 < 2)
        log->info("step {} t = {:.6f} tau = {:.3e}", state.step, state.t, state.tau_prev);
    }
  } catch (...) {
    if (options.write_files) stepper::write_checkpoint(state, ckpt);
    throw;
  }
  out.reached_end = state.t >= t_end;
  out.totals = stepper.solver().totals();

  std::vector<double> times;
  for (const auto &r : out.records) times.push_back(r.t);
  for (int f = 0; f < nf; ++f) {
    std::vector<double> v;
    for (const auto &r : out.records) v.push_back(r.mean_rel_vel[f]);
    out.events.push_back(times.empty() ? std::vector<SlipEvent>{}
                                       : detect_slip_events(times, v, config.loading.v_D));
  }

  if (options.write_files) {
    stepper::write_checkpoint(state, ckpt);
    for (int f = 0; f < nf; ++f) {
      GridField g;
      g.x = out.faults[f].x;
      for (const auto &s : out.faults[f].snapshots) {
        g.t.push_back(s.t);
        g.values.insert(g.values.end(), s.rel_vel.begin(), s.rel_vel.end());
      }
      write_level_lines(g, config.output.contour_levels,
                        (dir / ("contours_" + std::to_string(f) + ".txt")).string());
    }
  }
  out.final_state = std::move(state);
  return out;
}

}  // namespace faultsim::scenario

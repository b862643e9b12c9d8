#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <string>

#include "faultsim/error.hpp"
#include "faultsim/log.hpp"
#include "faultsim/scenario.hpp"

using namespace faultsim;

int main(int argc, char **argv) {
  CLI::App app{"2D multibody viscoelastic fault simulator"};
  app.require_subcommand(1);
  auto *run = app.add_subcommand("run", "run a scenario");

  std::string config_path, output_dir, preset_name, checkpoint, resume;
  std::optional<double> max_time;
  std::optional<int> refinements;
  std::optional<long> max_steps;
  std::optional<double> wall_seconds;
  run->add_option("--config", config_path, "JSON config merged over the preset");
  run->add_option("--output-dir", output_dir, "output directory");
  run->add_option("--preset", preset_name, "base preset")
      ->check(CLI::IsMember({"spring_slider", "layered_5body"}));
  run->add_option("--max-time", max_time, "stop at this time [s]");
  run->add_option("--refinements", refinements, "number of refinement levels K");
  run->add_option("--max-steps", max_steps, "stop after this many committed steps");
  run->add_option("--wall-limit", wall_seconds, "stop after this many seconds of wall time");
  run->add_option("--checkpoint", checkpoint, "checkpoint file written during and after the run");
  run->add_option("--resume", resume, "continue from a checkpoint");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  configure_logging();

  try {
    std::optional<std::string> pname;
    if (!preset_name.empty()) pname = preset_name;
    scenario::ScenarioConfig cfg = config_path.empty()
                                       ? scenario::preset(pname.value_or("spring_slider"))
                                       : scenario::load_config(config_path, pname);
    if (!output_dir.empty()) cfg.output.directory = output_dir;
    if (max_time) cfg.time.max_time = *max_time;
    if (refinements) cfg.mesh.max_levels = *refinements;
    cfg.validate();

    scenario::RunOptions opt;
    if (!checkpoint.empty()) opt.checkpoint = checkpoint;
    if (!resume.empty()) opt.resume = resume;
    opt.max_steps = max_steps;
    opt.wall_seconds = wall_seconds;
    auto out = scenario::run_scenario(cfg, opt);
    std::printf("%zu steps, t = %.6g s, %zu vertices\n", out.records.size() - (resume.empty() ? 1 : 0),
                out.final_state.t, out.vertices);
    for (std::size_t f = 0; f < out.events.size(); ++f)
      std::printf("fault %zu: %zu slip events\n", f, out.events[f].size());
    return 0;
  } catch (const ConfigError &e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const InvalidSpecError &e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const RefinementOverflowError &e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 3;
  }
}

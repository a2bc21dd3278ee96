#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include "carpool/errors.hpp"
#include "commands.hpp"
#include "manifest.hpp"

namespace {

using namespace carpool::cli;

void add_common(CLI::App& app, Common& common) {
  app.add_option("--out", common.out, "Output directory; manifest.json is written at its root")->capture_default_str();
  app.add_option("--seed", common.seed, "Root seed; components draw named sub-seeds from it")->capture_default_str();
  app.add_option("--jobs", common.jobs, "Worker threads for per-instance work")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--node-limit", common.node_limit, "Branch-and-bound node cap per solve")->capture_default_str();
  app.add_option("--time-limit-ms", common.time_limit_ms, "Wall-clock cap per solve in milliseconds")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Carpool dispatch: exact MIP solving, prompt rendering and temperature-schedule experiments"};
  app.set_version_flag("--version", std::string(CARPOOL_VERSION));
  app.set_config("--config", "", "TOML or INI file of option values; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  add_common(app, common);

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Sample random dispatch instances into instances.jsonl");
  generate->add_option("--count", gen.count, "Number of instances")->capture_default_str();
  generate->add_option("--size", gen.size, "Entities per set: m = n = p = size")->capture_default_str();

  SolveOptions solve_opts;
  auto* solve = app.add_subcommand("solve", "Solve instances exactly and write one result JSON per instance");
  solve->add_option("--in", solve_opts.in, "Instance JSON or JSONL file")->required()->check(CLI::ExistingFile);
  solve->add_flag("--lp", solve_opts.write_lp, "Also export each model in LP format");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run the batched ride-pooling simulator and persist snapshots");
  simulate->add_option("--orders", sim.orders, "Order CSV (synthetic orders when omitted)")->check(CLI::ExistingFile);
  simulate->add_option("--order-count", sim.order_count, "Synthetic order count")->capture_default_str();
  simulate->add_option("--span", sim.span, "Synthetic request window in seconds")->capture_default_str();
  simulate->add_option("--vehicles", sim.vehicles, "Fleet size")->capture_default_str();
  simulate->add_option("--grid-width", sim.grid_width, "Grid columns")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--grid-height", sim.grid_height, "Grid rows")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--cell-km", sim.cell_km, "Grid cell edge on the projected plane")->capture_default_str();
  simulate->add_option("--lat0", sim.lat0, "Latitude mapped to the grid centre")->capture_default_str();
  simulate->add_option("--lon0", sim.lon0, "Longitude mapped to the grid centre")->capture_default_str();
  simulate->add_option("--batch-window", sim.batch_window, "Seconds between matching rounds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--speed", sim.speed, "Vehicle speed in grid cells per second")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--share-willingness", sim.share_willingness, "Fraction of riders open to sharing")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  simulate->add_option("--max-round-orders", sim.max_round_orders, "Orders considered per round")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_flag("--skip-malformed", sim.skip_malformed, "Skip bad CSV rows instead of failing");

  PromptOptions prompt_opts;
  auto* prompt = app.add_subcommand("prompt", "Render the solver prompt for each instance (.txt plus .json sidecar)");
  prompt->add_option("--in", prompt_opts.in, "Instance JSON or JSONL file")->required()->check(CLI::ExistingFile);
  prompt->add_option("--exemplars", prompt_opts.exemplars, "Previous solutions to include")->capture_default_str();
  prompt->add_option("--exemplar-file", prompt_opts.exemplar_file,
                     "Solutions JSON; defaults to <input stem>_solutions.json when present, else solver incumbents")
      ->check(CLI::ExistingFile);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run one temperature schedule on each instance");
  run->add_option("--in", run_opts.in, "Instance JSON or JSONL file")->required()->check(CLI::ExistingFile);
  run->add_option("--schedule", run_opts.schedule, "fall, rise, rise_then_fall, constant or single")
      ->check(CLI::IsMember({"fall", "rise", "rise_then_fall", "constant", "single"}))
      ->capture_default_str();
  run->add_option("--temperatures", run_opts.temperatures, "Explicit temperature list (overrides the named schedule)");
  run->add_option("--proposer", run_opts.proposer, "mock, stochastic or remote")
      ->check(CLI::IsMember({"mock", "stochastic", "remote"}))
      ->capture_default_str();
  run->add_option("--fixtures", run_opts.fixtures, "Mock proposer directory of <round>.txt files")
      ->check(CLI::ExistingDirectory);
  run->add_option("--max-exemplars", run_opts.max_exemplars, "Exemplars shown per round")->capture_default_str();
  run->add_flag("--stop-on-optimal", run_opts.stop_on_optimal, "Stop once a round reaches the optimum");

  AblateOptions ablate_opts;
  auto* ablate = app.add_subcommand("ablate", "Compare temperature schedules against the solver's first incumbents");
  ablate->add_option("--in", ablate_opts.in, "Instance file (generated from --count/--size when omitted)")
      ->check(CLI::ExistingFile);
  ablate->add_option("--count", ablate_opts.count, "Generated instance count")->capture_default_str();
  ablate->add_option("--size", ablate_opts.size, "Generated entities per set")->capture_default_str();
  ablate->add_option("--proposer", ablate_opts.proposer, "mock, stochastic or remote")
      ->check(CLI::IsMember({"mock", "stochastic", "remote"}))
      ->capture_default_str();
  ablate->add_option("--fixtures", ablate_opts.fixtures, "Mock proposer directory")->check(CLI::ExistingDirectory);
  ablate->add_option("--schedules", ablate_opts.schedules, "Subset of schedules (default: all five)")
      ->check(CLI::IsMember({"fall", "rise", "rise_then_fall", "constant", "single"}));

  GrowthOptions growth_opts;
  auto* growth = app.add_subcommand("growth", "Measure model size and build time as the set size grows");
  growth->add_option("--sizes", growth_opts.sizes, "Set sizes s (m = n = p = s)");
  growth->add_option("--trials", growth_opts.trials, "Trials per size; the median time is reported")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  std::optional<RunManifest> manifest;
  int code = kFailed;
  std::string message;
  try {
    manifest.emplace(common.out, sub->get_name(), std::vector<std::string>(argv, argv + argc),
                     app.config_to_str(true, false), common.seed);
    if (sub == generate) code = cmd_generate(common, gen, *manifest);
    else if (sub == solve) code = cmd_solve(common, solve_opts, *manifest);
    else if (sub == simulate) code = cmd_simulate(common, sim, *manifest);
    else if (sub == prompt) code = cmd_prompt(common, prompt_opts, *manifest);
    else if (sub == run) code = cmd_run(common, run_opts, *manifest);
    else if (sub == ablate) code = cmd_ablate(common, ablate_opts, *manifest);
    else if (sub == growth) code = cmd_growth(common, growth_opts, *manifest);
  } catch (const carpool::ConfigError& e) {
    message = e.what();
    code = kUsage;
  } catch (const carpool::ProposerError& e) {
    message = e.what();
    code = kRemoteFailure;
  } catch (const std::exception& e) {
    message = e.what();
    code = kFailed;
  }
  if (!message.empty()) std::cerr << "carpool " << sub->get_name() << ": " << message << '\n';
  if (manifest) manifest->finish(code, message);
  return code;
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manifest.hpp"

namespace carpool::cli {

enum ExitCode : int {
  kOk = 0,
  kFailed = 1,
  kUsage = 2,
  kSolverAborted = 3,
  kRemoteFailure = 4,
};

struct Common {
  std::string out = "out";
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::uint64_t node_limit = 10'000'000;
  std::uint64_t time_limit_ms = 60'000;
};

struct GenerateOptions {
  std::size_t count = 100;
  std::size_t size = 5;
};

struct SolveOptions {
  std::string in;
  bool write_lp = false;
};

struct SimulateOptions {
  std::string orders;  // CSV; synthetic orders when empty
  std::size_t order_count = 100;
  double span = 600.0;
  std::size_t vehicles = 20;
  int grid_width = 20;
  int grid_height = 20;
  double cell_km = 1.0;
  double lat0 = 30.66;
  double lon0 = 104.06;
  double batch_window = 30.0;
  double speed = 1.0;
  double share_willingness = 0.5;
  std::size_t max_round_orders = 8;
  bool skip_malformed = false;
};

struct PromptOptions {
  std::string in;
  std::size_t exemplars = 0;
  std::string exemplar_file;
};

struct RunOptions {
  std::string in;
  std::string schedule = "fall";
  std::vector<double> temperatures;
  std::string proposer = "stochastic";
  std::string fixtures;
  std::size_t max_exemplars = 3;
  bool stop_on_optimal = false;
};

struct AblateOptions {
  std::string in;
  std::size_t count = 50;
  std::size_t size = 6;
  std::string proposer = "stochastic";
  std::string fixtures;
  std::vector<std::string> schedules;
};

struct GrowthOptions {
  std::vector<std::size_t> sizes{5, 10, 20, 40};
  std::size_t trials = 5;
};

int cmd_generate(const Common& common, const GenerateOptions& opts, RunManifest& manifest);
int cmd_solve(const Common& common, const SolveOptions& opts, RunManifest& manifest);
int cmd_simulate(const Common& common, const SimulateOptions& opts, RunManifest& manifest);
int cmd_prompt(const Common& common, const PromptOptions& opts, RunManifest& manifest);
int cmd_run(const Common& common, const RunOptions& opts, RunManifest& manifest);
int cmd_ablate(const Common& common, const AblateOptions& opts, RunManifest& manifest);
int cmd_growth(const Common& common, const GrowthOptions& opts, RunManifest& manifest);

}  // namespace carpool::cli

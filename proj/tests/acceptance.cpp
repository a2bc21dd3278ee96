// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "carpool/errors.hpp"
#include "carpool/eval.hpp"
#include "carpool/model.hpp"
#include "carpool/prompt.hpp"
#include "carpool/schedule.hpp"
#include "carpool/sim.hpp"
#include "carpool/solver.hpp"
#include "oracles.hpp"

namespace {

using namespace carpool;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Assignment exemplar_solution() {
  Assignment sol;
  sol.x = {{0, 1}, {1, 0}};
  sol.z = {{1, 2}};
  return sol;
}

std::string ac1() {
  const auto inst = exemplar_instance();
  const auto sol = exemplar_solution();
  const auto start = Clock::now();
  const double objective = evaluate_objective(inst, sol);
  const double elapsed = ms_since(start);
  require(std::abs(objective - 24.36) <= 1e-9, "objective " + std::to_string(objective));
  require(elapsed < 1.0, "took " + std::to_string(elapsed) + " ms");
  char buf[96];
  std::snprintf(buf, sizeof buf, "objective %.12f in %.4f ms", objective, elapsed);
  return buf;
}

std::string ac2() {
  const auto inst = exemplar_instance();
  const auto bundle = render_prompt(inst, {make_exemplar(inst, exemplar_solution(), 1.0)});
  const auto golden = read_file(fs::path(CARPOOL_SOURCE_DIR) / "tests/golden/exemplar_prompt.txt");
  require(!golden.empty(), "golden file missing");
  require(bundle.full_text == golden, "rendered prompt differs from golden");
  return std::to_string(golden.size()) + " bytes identical";
}

std::string ac3() {
  Rng rng(2024);
  const auto start = Clock::now();
  std::size_t feasible = 0;
  for (int t = 0; t < 500; ++t) {
    const auto inst =
        random_instance("oracle-" + std::to_string(t), rng.below(3), rng.below(3), 1 + rng.below(4), rng.next());
    const auto exact = solve_exact(build_model(inst).model);
    const auto oracle = brute_force(inst);
    const bool exact_infeasible = exact.status == SolveStatus::kInfeasible;
    require(exact_infeasible == (oracle.status == SolveStatus::kInfeasible), inst.id + " feasibility disagrees");
    if (exact_infeasible) continue;
    require(exact.status == SolveStatus::kOptimal, inst.id + " not optimal");
    require(std::abs(*exact.best_objective() - *oracle.best_objective()) <= 1e-9, inst.id + " optimum differs");
    ++feasible;
  }
  const double elapsed = ms_since(start);
  require(elapsed < 60'000.0, "took " + std::to_string(elapsed) + " ms");
  return "500 instances (" + std::to_string(feasible) + " feasible) in " + std::to_string(elapsed / 1000.0) + " s";
}

std::string ac4() {
  std::size_t checked = 0;
  std::size_t last_nominal = 0;
  for (std::size_t m = 0; m <= 6; ++m) {
    for (std::size_t n = 0; n <= 6; ++n) {
      for (std::size_t p = 0; p <= 6; ++p) {
        const auto model = build_model(random_instance("shape", m, n, p, m * 49 + n * 7 + p)).model;
        const std::size_t cols = m * p + m * p * (p > 0 ? p - 1 : 0) + n * p;
        require(model.num_rows() == m + n + p, "rows at " + std::to_string(m) + "/" + std::to_string(n) + "/" +
                                                   std::to_string(p));
        require(model.num_cols() == cols, "cols at " + std::to_string(m) + "/" + std::to_string(n) + "/" +
                                              std::to_string(p));
        const auto shape = matrix_shape(m, n, p);
        require(shape.rows == model.num_rows() && shape.cols == cols, "matrix_shape disagrees with model");
        require(shape.nominal_cols == m * p + m * p * p + n * p, "nominal column count");
        last_nominal = shape.nominal_cols;
        ++checked;
      }
    }
  }
  const auto s = matrix_shape(6, 6, 6);
  return std::to_string(checked) + " shapes; 6/6/6 has " + std::to_string(s.cols) + " cols (nominal " +
         std::to_string(last_nominal) + ")";
}

std::string ac5() {
  const std::map<std::string, std::vector<double>> expected{
      {"fall", {1.0, 0.1, 0.01}},
      {"rise", {0.01, 0.1, 1.0}},
      {"rise_then_fall", {0.01, 1.0, 0.01}},
      {"constant", {0.01, 0.01, 0.01}},
      {"single", {0.01}},
  };
  for (const auto& [name, temps] : expected) {
    const auto schedule = make_schedule(name);
    require(schedule.name == name && schedule.temperatures == temps, name + " temperatures");
  }
  bool threw = false;
  try {
    make_schedule("warm");
  } catch (const ConfigError&) {
    threw = true;
  }
  require(threw, "unknown schedule accepted");
  return "5 schedules exact";
}

std::string ac6() {
  struct Case {
    double objective, optimal, expected;
  };
  const Case cases[] = {
      {17.5, 17.5, 0.0},  {24.36, 0.0, 1.0},   {20, 15, 0.25},     {10, 5, 0.5},
      {4, 3, 0.25},       {8, 6, 0.25},        {100, 99, 0.01},    {5, 0, 1.0},
      {0, 0, 0.0},        {2, 1, 0.5},         {1, 1, 0.0},        {12.5, 10, 0.2},
      {40, 30, 0.25},     {16, 12, 0.25},      {50, 45, 0.1},      {3, 2.4, 0.2},
      {25, 20, 0.2},      {9.55, 9.55, 0.0},   {24.36, 9.55, 0.6079638752052545},
      {5 + 1e-12, 5, 0.0},
  };
  static_assert(std::size(cases) == 20);
  for (const auto& c : cases) {
    require(std::abs(eval_gap(c.objective, c.optimal) - c.expected) <= 1e-12,
            "eval_gap(" + std::to_string(c.objective) + ", " + std::to_string(c.optimal) + ")");
  }
  const std::vector<GapRecord> records{
      {"a", 0.0, 0.2, 9},
      {"b", 0.1, 0.1, 9},
      {"c", 0.3, 0.2, 9},
      {"d", std::nullopt, 0.0, 9},
  };
  const auto report = score_records("fall", records);
  require(report.wins == std::vector<bool>{true, false, false, false}, "win pattern");
  require(report.average_score == 0.25, "fixture score " + std::to_string(report.average_score));
  return "20 gap cases, fixture score 0.25";
}

std::string ac7() {
  RoadNetwork free_grid(10, 10);
  for (int a = 0; a < 100; ++a) {
    for (int b = 0; b < 100; ++b) {
      const Cell from{a % 10, a / 10}, to{b % 10, b / 10};
      const auto manhattan_len = static_cast<std::size_t>(std::abs(from.col - to.col) + std::abs(from.row - to.row));
      require(dijkstra_path(free_grid, from, to).length == manhattan_len, "free grid pair " + std::to_string(a) +
                                                                              "->" + std::to_string(b));
    }
  }
  Rng rng(2718);
  std::size_t reachable = 0;
  for (int t = 0; t < 100; ++t) {
    const Cell from{0, 0}, to{11, 11};
    const auto net = carpool::testing::random_maze(12, 12, 0.3, rng, from, to);
    const auto expected = carpool::testing::bfs_length(net, from, to);
    if (expected) {
      require(dijkstra_path(net, from, to).length == *expected, "maze " + std::to_string(t));
      ++reachable;
    } else {
      bool threw = false;
      try {
        dijkstra_path(net, from, to);
      } catch (const NoPathError&) {
        threw = true;
      }
      require(threw, "maze " + std::to_string(t) + " should be unreachable");
    }
  }
  return "10000 free pairs, 100 mazes (" + std::to_string(reachable) + " reachable)";
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CARPOOL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string ac8() {
  const auto root = fs::temp_directory_path() / "carpool_acceptance_ablate";
  fs::remove_all(root);
  const std::array<fs::path, 2> dirs{root / "a", root / "b"};
  for (const auto& dir : dirs) {
    const int code = run_cli("ablate --proposer stochastic --seed 7 --count 50 --size 6 --out '" + dir.string() + "'");
    require(code == 0, "ablate exited " + std::to_string(code));
  }
  for (const auto* name : {"ablation.csv", "scale.csv", "summary.json", "table.md"}) {
    const auto a = read_file(dirs[0] / name);
    require(!a.empty(), std::string(name) + " missing");
    require(a == read_file(dirs[1] / name), std::string(name) + " differs between runs");
  }
  const auto summary = nlohmann::json::parse(read_file(dirs[0] / "summary.json"));
  std::map<std::string, double> score;
  for (const auto& s : summary["schedules"]) score[s["name"].get<std::string>()] = s["average_score"].get<double>();
  require(score.count("fall") && score.count("single"), "summary lacks fall or single");
  char buf[96];
  std::snprintf(buf, sizeof buf, "byte-identical reruns; fall %.3f, single %.3f", score["fall"], score["single"]);
  require(score["fall"] >= score["single"], buf);
  return buf;
}

std::string ac9() {
  Rng rng(1000);
  std::size_t cases = 0;
  while (cases < 1000) {
    const auto inst = random_instance("rt", rng.below(5), rng.below(5), 1 + rng.below(8), rng.next());
    const auto sol = carpool::testing::random_feasible_assignment(inst, rng);
    if (!sol) continue;
    ++cases;
    const auto block = render_exemplar_block(make_exemplar(inst, *sol, 0.5));
    require(parse_solution(block, inst).assignment == *sol, "round trip failed for:\n" + block);
  }
  return "1000 assignments";
}

std::string ac10() {
  RoadNetwork net(20, 20);
  SimConfig cfg;
  cfg.seed = 7;
  const auto orders = generate_synthetic_orders(7, 100, net.bounds(), 600.0);
  const auto result = run_simulation(net, orders, make_fleet(net, 20, 7), cfg);
  require(result.summary.max_occupancy <= 2, "occupancy " + std::to_string(result.summary.max_occupancy));

  std::map<std::size_t, std::array<int, 3>> counts;
  for (const auto& e : result.events) ++counts[e.order][static_cast<int>(e.kind)];
  require(counts.size() == result.summary.matched, "matched orders without events");
  for (const auto& [order, c] : counts) {
    require(c[0] == 1 && c[1] == 1 && c[2] == 1, "order " + std::to_string(order) + " event counts");
  }
  for (const auto& snap : result.snapshots) {
    const auto stored = snap.solve.best_objective();
    require(stored.has_value(), "snapshot without objective");
    const auto reloaded = snapshot_from_json(nlohmann::json::parse(to_json(snap).dump()));
    const auto again = solve_exact(build_model(reloaded.instance).model);
    require(std::abs(*again.best_objective() - *stored) <= 1e-9, "snapshot re-solve differs");
  }
  return std::to_string(result.summary.matched) + " orders matched, " + std::to_string(result.snapshots.size()) +
         " snapshots re-solved";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<std::string()>>> criteria{
      {"AC1 exemplar objective", ac1},  {"AC2 prompt golden", ac2},     {"AC3 oracle equivalence", ac3},
      {"AC4 matrix shape", ac4},        {"AC5 schedules", ac5},         {"AC6 gap metric", ac6},
      {"AC7 grid dijkstra", ac7},       {"AC8 ablation determinism", ac8}, {"AC9 render/parse round trip", ac9},
      {"AC10 simulator conservation", ac10},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    try {
      const auto detail = check();
      std::cout << "PASS " << name << ": " << detail << std::endl;
    } catch (const Failure& f) {
      ++failures;
      std::cout << "FAIL " << name << ": " << f.what << std::endl;
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL " << name << ": exception " << e.what() << std::endl;
    }
  }
  return failures == 0 ? 0 : 1;
}

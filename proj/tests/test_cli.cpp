#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

const fs::path kSource = CARPOOL_SOURCE_DIR;

struct Invocation {
  int code = -1;
  std::string output;  // stdout and stderr
};

Invocation carpool(const std::string& args) {
  const std::string cmd = std::string(CARPOOL_CLI_PATH) + " " + args + " 2>&1";
  Invocation inv;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return inv;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) inv.output.append(buf, n);
  const int status = ::pclose(pipe);
  inv.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return inv;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "carpool_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST(Cli, HelpOnEverySubcommandDocumentsItsFlags) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> expected{
      {"generate", {"--count", "--size"}},
      {"solve", {"--in", "--lp"}},
      {"simulate", {"--orders", "--vehicles", "--batch-window", "--share-willingness"}},
      {"prompt", {"--in", "--exemplars", "--exemplar-file"}},
      {"run", {"--schedule", "--proposer", "--fixtures", "--temperatures"}},
      {"ablate", {"--proposer", "--count", "--size", "--schedules"}},
      {"growth", {"--sizes", "--trials"}},
  };
  for (const auto& [sub, flags] : expected) {
    const auto inv = carpool(sub + " --help");
    EXPECT_EQ(inv.code, 0) << sub;
    for (const auto& flag : flags) EXPECT_NE(inv.output.find(flag), std::string::npos) << sub << " " << flag;
  }
  const auto top = carpool("--help");
  EXPECT_EQ(top.code, 0);
  for (const auto* flag : {"--out", "--seed", "--jobs", "--node-limit", "--time-limit-ms", "--config"}) {
    EXPECT_NE(top.output.find(flag), std::string::npos) << flag;
  }
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(carpool("").code, 2);
  EXPECT_EQ(carpool("generate --count many").code, 2);
  EXPECT_EQ(carpool("generate --bogus").code, 2);
  EXPECT_EQ(carpool("solve").code, 2);
  EXPECT_EQ(carpool("solve --in /nonexistent/instances.jsonl").code, 2);
  const auto dir = fresh_dir("usage");
  EXPECT_EQ(carpool("run --proposer mock --in " + q(kSource / "fixtures/exemplar.json") + " --out " + q(dir)).code, 2);
  EXPECT_EQ(carpool("run --schedule warm --in " + q(kSource / "fixtures/exemplar.json")).code, 2);
}

TEST(Cli, GenerateCountsAndDeterminism) {
  const auto a = fresh_dir("gen_a"), b = fresh_dir("gen_b"), zero = fresh_dir("gen_zero");
  ASSERT_EQ(carpool("generate --count 100 --size 5 --seed 1 --out " + q(a)).code, 0);
  ASSERT_EQ(carpool("generate --count 100 --size 5 --seed 1 --out " + q(b)).code, 0);
  const auto text = read_file(a / "instances.jsonl");
  EXPECT_EQ(count_lines(text), 100u);
  EXPECT_EQ(text, read_file(b / "instances.jsonl"));
  const auto first = nlohmann::json::parse(text.substr(0, text.find('\n')));
  EXPECT_EQ(first["users"].size(), 5u);

  ASSERT_EQ(carpool("generate --count 0 --out " + q(zero)).code, 0);
  EXPECT_TRUE(fs::exists(zero / "instances.jsonl"));
  EXPECT_EQ(fs::file_size(zero / "instances.jsonl"), 0u);
}

TEST(Cli, ManifestRecordsCommandSeedAndArtifacts) {
  const auto dir = fresh_dir("manifest");
  ASSERT_EQ(carpool("generate --count 2 --seed 9 --out " + q(dir)).code, 0);
  const auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  EXPECT_EQ(manifest["command"], "generate");
  EXPECT_EQ(manifest["seed"], 9);
  EXPECT_EQ(manifest["status"], "ok");
  EXPECT_EQ(manifest["exit_code"], 0);
  EXPECT_EQ(manifest["artifacts"], nlohmann::json::array({"instances.jsonl"}));
  EXPECT_NE(manifest["config"].get<std::string>().find("seed=9"), std::string::npos);
  EXPECT_TRUE(manifest.contains("started_at"));
  EXPECT_TRUE(manifest.contains("finished_at"));
}

TEST(Cli, ConfigFileSitsBetweenFlagsAndDefaults) {
  const auto dir = fresh_dir("config");
  std::ofstream(dir / "carpool.toml") << "seed = 5\n[generate]\ncount = 3\nsize = 2\n";
  ASSERT_EQ(carpool("generate --config " + q(dir / "carpool.toml") + " --out " + q(dir / "a")).code, 0);
  EXPECT_EQ(count_lines(read_file(dir / "a/instances.jsonl")), 3u);
  EXPECT_EQ(nlohmann::json::parse(read_file(dir / "a/manifest.json"))["seed"], 5);

  ASSERT_EQ(carpool("generate --config " + q(dir / "carpool.toml") + " --count 4 --seed 6 --out " + q(dir / "b")).code, 0);
  EXPECT_EQ(count_lines(read_file(dir / "b/instances.jsonl")), 4u);
  EXPECT_EQ(nlohmann::json::parse(read_file(dir / "b/manifest.json"))["seed"], 6);
}

TEST(Cli, SolveExemplarIsOptimal) {
  const auto dir = fresh_dir("solve");
  const auto inv = carpool("solve --lp --in " + q(kSource / "fixtures/exemplar.json") + " --out " + q(dir));
  ASSERT_EQ(inv.code, 0) << inv.output;
  const auto doc = nlohmann::json::parse(read_file(dir / "solve/exemplar.json"));
  EXPECT_EQ(doc["result"]["status"], "optimal");
  EXPECT_NEAR(doc["result"]["optimal_objective"].get<double>(), 9.5500000000000114, 1e-9);
  EXPECT_EQ(doc["result"]["optimal"]["z"], "(0, 0) (1, 2) (2, 1)");
  EXPECT_EQ(read_file(dir / "lp/exemplar.lp").rfind("\\ carpool dispatch model exemplar", 0), 0u);
}

TEST(Cli, SolveAbortExitsThreeWithPartialArtifacts) {
  const auto dir = fresh_dir("abort");
  ASSERT_EQ(carpool("generate --count 1 --size 6 --out " + q(dir)).code, 0);
  const auto inv = carpool("solve --node-limit 50 --in " + q(dir / "instances.jsonl") + " --out " + q(dir));
  EXPECT_EQ(inv.code, 3) << inv.output;
  const auto doc = nlohmann::json::parse(read_file(dir / "solve/inst-0.json"));
  EXPECT_EQ(doc["result"]["status"], "aborted");
  EXPECT_FALSE(doc["result"]["incumbents"].empty());
}

TEST(Cli, PromptMatchesGolden) {
  const auto dir = fresh_dir("prompt");
  const auto inv = carpool("prompt --in " + q(kSource / "fixtures/exemplar.json") + " --exemplars 1 --out " + q(dir));
  ASSERT_EQ(inv.code, 0) << inv.output;
  EXPECT_EQ(read_file(dir / "prompts/exemplar.txt"), read_file(kSource / "tests/golden/exemplar_prompt.txt"));
  const auto sidecar = nlohmann::json::parse(read_file(dir / "prompts/exemplar.json"));
  EXPECT_EQ(sidecar["exemplars"].size(), 1u);
}

TEST(Cli, PromptFallsBackToSolverIncumbents) {
  const auto dir = fresh_dir("prompt_solver");
  ASSERT_EQ(carpool("generate --count 1 --size 3 --out " + q(dir)).code, 0);
  ASSERT_EQ(carpool("prompt --exemplars 2 --in " + q(dir / "instances.jsonl") + " --out " + q(dir)).code, 0);
  const auto text = read_file(dir / "prompts/inst-0.txt");
  EXPECT_NE(text.find("one of solutions starts:"), std::string::npos);
}

TEST(Cli, RunWithMockMatchesGoldenTrace) {
  const auto dir = fresh_dir("run_mock");
  const auto inv = carpool("run --proposer mock --fixtures " + q(kSource / "fixtures/mock_rounds") +
                           " --schedule fall --in " + q(kSource / "fixtures/exemplar.json") + " --out " + q(dir));
  ASSERT_EQ(inv.code, 0) << inv.output;
  EXPECT_EQ(nlohmann::json::parse(read_file(dir / "runs/exemplar.fall.json")),
            nlohmann::json::parse(read_file(kSource / "tests/golden/mock_fall_trace.json")));
}

TEST(Cli, RunFixtureExhaustionFails) {
  const auto dir = fresh_dir("run_short");
  fs::create_directories(dir / "fixtures");
  std::ofstream(dir / "fixtures/1.txt") << "x: (0, 1) (1, 0)\n\nz: (1, 2)\n";
  const auto inv = carpool("run --proposer mock --fixtures " + q(dir / "fixtures") + " --in " +
                           q(kSource / "fixtures/exemplar.json") + " --out " + q(dir));
  EXPECT_EQ(inv.code, 1) << inv.output;
  EXPECT_TRUE(fs::exists(dir / "runs/exemplar.fall.json"));
}

TEST(Cli, RemoteFailureExitsFour) {
  const auto dir = fresh_dir("remote");
  const std::string env = "CARPOOL_ENDPOINT_URL=http://127.0.0.1:9 CARPOOL_MODEL=none ";
  const std::string cmd = env + CARPOOL_CLI_PATH + " run --proposer remote --schedule single --in " +
                          q(kSource / "fixtures/exemplar.json") + " --out " + q(dir) + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 4);
  EXPECT_EQ(nlohmann::json::parse(read_file(dir / "manifest.json"))["exit_code"], 4);
}

TEST(Cli, SimulateWritesSnapshots) {
  const auto dir = fresh_dir("simulate");
  const auto inv = carpool("simulate --order-count 30 --vehicles 6 --grid-width 10 --grid-height 10 --seed 3 --out " + q(dir));
  ASSERT_EQ(inv.code, 0) << inv.output;
  const auto summary = nlohmann::json::parse(read_file(dir / "sim_summary.json"));
  EXPECT_EQ(summary["completed"], 30);
  EXPECT_EQ(count_lines(read_file(dir / "snapshots.jsonl")), summary["snapshots"].get<std::size_t>());
  EXPECT_EQ(count_lines(read_file(dir / "instances.jsonl")), summary["snapshots"].get<std::size_t>());
}

TEST(Cli, SimulateIngestsOrderCsv) {
  const auto dir = fresh_dir("simulate_csv");
  std::ofstream(dir / "orders.csv") << "order_id,request_time,pickup_lat,pickup_lon,dropoff_lat,dropoff_lon\n"
                                       "a,5,30.660,104.060,30.680,104.080\n"
                                       "b,7,30.650,104.050,30.640,104.070\n"
                                       "c,9,95.000,104.050,30.640,104.070\n";
  EXPECT_EQ(carpool("simulate --orders " + q(dir / "orders.csv") + " --out " + q(dir)).code, 1);
  const auto inv = carpool("simulate --skip-malformed --orders " + q(dir / "orders.csv") + " --vehicles 3 --out " + q(dir));
  ASSERT_EQ(inv.code, 0) << inv.output;
  const auto summary = nlohmann::json::parse(read_file(dir / "sim_summary.json"));
  EXPECT_EQ(summary["completed"], 2);
  EXPECT_EQ(summary["skipped_rows"], 1);
}

TEST(Cli, SmallAblationIsDeterministic) {
  const auto a = fresh_dir("ablate_a"), b = fresh_dir("ablate_b");
  const std::string args = "ablate --proposer stochastic --seed 2 --count 6 --size 3 --jobs 2 --out ";
  ASSERT_EQ(carpool(args + q(a)).code, 0);
  ASSERT_EQ(carpool(args + q(b)).code, 0);
  for (const auto* name : {"ablation.csv", "scale.csv", "summary.json", "table.md"}) {
    EXPECT_EQ(read_file(a / name), read_file(b / name)) << name;
    EXPECT_FALSE(read_file(a / name).empty()) << name;
  }
  EXPECT_EQ(count_lines(read_file(a / "ablation.csv")), 1u + 6u * 5u);
}

TEST(Cli, GrowthCsv) {
  const auto dir = fresh_dir("growth");
  ASSERT_EQ(carpool("growth --sizes 5 10 --trials 1 --out " + q(dir)).code, 0);
  const auto csv = read_file(dir / "growth.csv");
  EXPECT_EQ(csv.rfind("s,rows,cols,nonzeros,build_ns\n5,15,150,", 0), 0u) << csv;
  EXPECT_NE(csv.find("\n10,30,1100,"), std::string::npos) << csv;
}

}  // namespace

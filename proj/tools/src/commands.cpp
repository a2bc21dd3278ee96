#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <nlohmann/json.hpp>

#include "carpool/errors.hpp"
#include "carpool/eval.hpp"
#include "carpool/model.hpp"
#include "carpool/remote_proposer.hpp"
#include "carpool/schedule.hpp"
#include "carpool/sim.hpp"
#include "carpool/solver.hpp"

namespace carpool::cli {
namespace {

namespace fs = std::filesystem;

std::string file_stem_for(const std::string& id) {
  std::string out = id.empty() ? "instance" : id;
  for (char& c : out) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

std::ofstream open_output(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& doc, RunManifest& manifest) {
  open_output(path) << doc.dump(2) << '\n';
  manifest.add_artifact(path);
}

SolveLimits limits_of(const Common& common) {
  SolveLimits limits;
  limits.node_limit = common.node_limit;
  limits.time_limit = std::chrono::milliseconds(common.time_limit_ms);
  return limits;
}

std::vector<DispatchInstance> generated_instances(std::uint64_t seed, std::size_t count, std::size_t size) {
  std::vector<DispatchInstance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(random_instance("inst-" + std::to_string(i), size, size, size, sub_seed(seed, "instance-gen", i)));
  }
  return out;
}

std::unique_ptr<Proposer> make_proposer(const std::string& kind, const std::string& fixtures) {
  if (kind == "stochastic") return std::make_unique<StochasticProposer>();
  if (kind == "mock") {
    if (fixtures.empty()) throw ConfigError("--proposer mock needs --fixtures DIR");
    return std::make_unique<MockProposer>(MockProposer::from_directory(fixtures));
  }
  if (kind == "remote") {
    auto cfg = EndpointConfig::from_env();
    cfg.log = [](std::string_view line) { std::cerr << "remote: " << line << '\n'; };
    return std::make_unique<RemoteProposer>(std::move(cfg));
  }
  throw ConfigError("unknown proposer '" + kind + "'");
}

/// Exemplars for `inst` from a solutions file: an array applies to every
/// instance, an object maps instance id to an array.
std::vector<Exemplar> exemplars_from_file(const nlohmann::json& doc, const DispatchInstance& inst, std::size_t k) {
  const nlohmann::json* entries = &doc;
  if (doc.is_object()) {
    if (!doc.contains(inst.id)) return {};
    entries = &doc[inst.id];
  }
  if (!entries->is_array()) throw ParseError("solutions file must hold an array of solutions");
  std::vector<Exemplar> out;
  const double bound = root_lower_bound(build_model(inst).model);
  for (const auto& entry : *entries) {
    if (out.size() == k) break;
    auto solution = entry.get<Assignment>();
    const double objective = evaluate_objective(inst, solution);
    const double gap = entry.contains("gap") ? entry["gap"].get<double>()
                                             : (objective > 0 ? (objective - bound) / objective : 0.0);
    out.push_back(make_exemplar(inst, std::move(solution), gap));
  }
  return out;
}

}  // namespace

int cmd_generate(const Common& common, const GenerateOptions& opts, RunManifest& manifest) {
  const fs::path path = fs::path(common.out) / "instances.jsonl";
  auto out = open_output(path);
  for (const auto& inst : generated_instances(common.seed, opts.count, opts.size)) {
    out << nlohmann::json(inst).dump() << '\n';
  }
  manifest.add_artifact(path);
  std::cerr << "wrote " << opts.count << " instances to " << path.string() << '\n';
  return kOk;
}

int cmd_solve(const Common& common, const SolveOptions& opts, RunManifest& manifest) {
  const auto instances = load_instances(opts.in);
  const auto solved = solve_all(instances, limits_of(common), common.jobs);
  int code = kOk;
  for (const auto& item : solved) {
    const auto stem = file_stem_for(item.instance.id);
    write_json(fs::path(common.out) / "solve" / (stem + ".json"),
               {{"instance_id", item.instance.id}, {"result", to_json(item.solve)}}, manifest);
    if (opts.write_lp) {
      const auto lp_path = fs::path(common.out) / "lp" / (stem + ".lp");
      auto lp = open_output(lp_path);
      write_lp(lp, build_model(item.instance).model);
      manifest.add_artifact(lp_path);
    }
    const auto best = item.solve.best_objective();
    std::cout << item.instance.id << ' ' << to_string(item.solve.status);
    if (best) std::cout << ' ' << format_fixed2(*best);
    std::cout << '\n';
    if (item.solve.status == SolveStatus::kAborted) code = kSolverAborted;
  }
  return code;
}

int cmd_simulate(const Common& common, const SimulateOptions& opts, RunManifest& manifest) {
  const Point origin{-0.5 * opts.grid_width * opts.cell_km, -0.5 * opts.grid_height * opts.cell_km};
  const RoadNetwork net(opts.grid_width, opts.grid_height, {}, origin, opts.cell_km);

  std::vector<OrderEvent> orders;
  std::size_t skipped = 0;
  if (!opts.orders.empty()) {
    IngestOptions ingest;
    ingest.projection.lon0_deg = opts.lon0;
    ingest.projection.reference_lat_deg = opts.lat0;
    ingest.projection.scale = ProjectionConfig::default_scale(opts.lat0);
    ingest.projection.y_offset = -mercator_project(opts.lat0, opts.lon0, ingest.projection).y;
    ingest.network = &net;
    ingest.skip_malformed = opts.skip_malformed;
    auto result = ingest_orders(opts.orders, ingest);
    for (const auto& line : result.skipped) std::cerr << "skipped " << line << '\n';
    skipped = result.skipped.size();
    orders = std::move(result.events);
  } else {
    orders = generate_synthetic_orders(sub_seed(common.seed, "orders"), opts.order_count, net.bounds(), opts.span);
  }

  SimConfig cfg;
  cfg.batch_window = opts.batch_window;
  cfg.vehicle_speed = opts.speed;
  cfg.share_willingness = opts.share_willingness;
  cfg.max_round_orders = opts.max_round_orders;
  cfg.seed = sub_seed(common.seed, "sim");
  cfg.limits = limits_of(common);

  const fs::path snapshots_path = fs::path(common.out) / "snapshots.jsonl";
  const fs::path instances_path = fs::path(common.out) / "instances.jsonl";
  auto snapshots = open_output(snapshots_path);
  auto instances = open_output(instances_path);
  bool aborted = false;
  const auto result = run_simulation(net, orders, make_fleet(net, opts.vehicles, sub_seed(common.seed, "fleet")), cfg,
                                     [&](const SnapshotRecord& rec) {
                                       snapshots << to_json(rec).dump() << '\n';
                                       snapshots.flush();
                                       instances << nlohmann::json(rec.instance).dump() << '\n';
                                       aborted = aborted || rec.solve.status == SolveStatus::kAborted;
                                     });
  manifest.add_artifact(snapshots_path);
  manifest.add_artifact(instances_path);

  auto summary = to_json(result.summary);
  summary["snapshots"] = result.snapshots.size();
  summary["skipped_rows"] = skipped;
  write_json(fs::path(common.out) / "sim_summary.json", summary, manifest);
  std::cout << summary.dump(2) << '\n';
  return aborted ? kSolverAborted : kOk;
}

int cmd_prompt(const Common& common, const PromptOptions& opts, RunManifest& manifest) {
  const auto instances = load_instances(opts.in);

  std::string solutions_path = opts.exemplar_file;
  if (solutions_path.empty()) {
    fs::path sibling(opts.in);
    sibling.replace_filename(sibling.stem().string() + "_solutions.json");
    if (fs::exists(sibling)) solutions_path = sibling.string();
  }
  std::optional<nlohmann::json> solutions;
  if (!solutions_path.empty() && opts.exemplars > 0) {
    std::ifstream in(solutions_path);
    if (!in) throw ConfigError("cannot open " + solutions_path);
    solutions = nlohmann::json::parse(in);
  }

  int code = kOk;
  for (const auto& inst : instances) {
    std::vector<Exemplar> exemplars;
    if (solutions) {
      exemplars = exemplars_from_file(*solutions, inst, opts.exemplars);
    } else if (opts.exemplars > 0) {
      const auto solve = solve_exact(build_model(inst).model, limits_of(common));
      if (solve.status == SolveStatus::kAborted) code = kSolverAborted;
      for (const auto& inc : first_k_incumbents(solve, opts.exemplars)) {
        exemplars.push_back(make_exemplar(inst, inc.solution, inc.solver_gap));
      }
    }
    const auto bundle = render_prompt(inst, exemplars);
    const auto stem = fs::path(common.out) / "prompts" / file_stem_for(inst.id);
    fs::create_directories(stem.parent_path());
    write_prompt_files(bundle, stem.string());
    manifest.add_artifact(stem.string() + ".txt");
    manifest.add_artifact(stem.string() + ".json");
  }
  std::cerr << "rendered " << instances.size() << " prompt(s)\n";
  return code;
}

int cmd_run(const Common& common, const RunOptions& opts, RunManifest& manifest) {
  const auto instances = load_instances(opts.in);
  const auto schedule = opts.temperatures.empty() ? make_schedule(opts.schedule)
                                                  : custom_schedule(opts.schedule, opts.temperatures);
  auto proposer = make_proposer(opts.proposer, opts.fixtures);
  ScheduleConfig cfg;
  cfg.max_exemplars = opts.max_exemplars;
  cfg.stop_on_optimal = opts.stop_on_optimal;

  int code = kOk;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const auto solve = solve_exact(build_model(inst).model, limits_of(common));
    std::optional<double> reference;
    if (solve.status == SolveStatus::kOptimal) reference = solve.best_objective();
    if (solve.status == SolveStatus::kAborted && code == kOk) code = kSolverAborted;

    const auto run = run_schedule(inst, schedule, *proposer, reference, sub_seed(common.seed, "instance", i), cfg);
    write_json(fs::path(common.out) / "runs" / (file_stem_for(inst.id) + "." + schedule.name + ".json"), to_json(run),
               manifest);

    std::cout << inst.id << ' ' << schedule.name << ": ";
    if (run.best) {
      std::cout << "best " << format_fixed2(run.best->objective) << " (round " << run.best->round << ")";
      if (run.best->eval_gap) std::cout << ", gap " << format_gap(*run.best->eval_gap);
    } else {
      std::cout << "no feasible proposal";
    }
    std::cout << '\n';
    if (run.error) {
      std::cerr << inst.id << ": " << *run.error << '\n';
      code = proposer->kind() == ProposerKind::kRemote ? kRemoteFailure : kFailed;
    }
  }
  return code;
}

int cmd_ablate(const Common& common, const AblateOptions& opts, RunManifest& manifest) {
  const auto instances =
      opts.in.empty() ? generated_instances(common.seed, opts.count, opts.size) : load_instances(opts.in);
  std::vector<TemperatureSchedule> schedules;
  if (opts.schedules.empty()) {
    for (auto name : kScheduleNames) schedules.push_back(make_schedule(name));
  } else {
    for (const auto& name : opts.schedules) schedules.push_back(make_schedule(name));
  }
  auto proposer = make_proposer(opts.proposer, opts.fixtures);

  const auto solved = solve_all(instances, limits_of(common), common.jobs);
  const bool aborted = std::any_of(solved.begin(), solved.end(),
                                   [](const SolvedInstance& s) { return s.solve.status == SolveStatus::kAborted; });
  const auto report = ablation_report(solved, schedules, *proposer, common.seed, common.jobs);

  const fs::path out(common.out);
  {
    auto csv = open_output(out / "ablation.csv");
    write_ablation_csv(csv, report);
    auto scale = open_output(out / "scale.csv");
    write_scale_csv(scale, report);
    auto table = open_output(out / "table.md");
    write_score_table(table, report);
  }
  manifest.add_artifact(out / "ablation.csv");
  manifest.add_artifact(out / "scale.csv");
  manifest.add_artifact(out / "table.md");
  write_json(out / "summary.json", summary_json(report), manifest);
  write_score_table(std::cout, report);

  if (report.errors > 0) {
    std::cerr << report.errors << " instance run(s) failed; see the error column in ablation.csv\n";
    if (proposer->kind() == ProposerKind::kRemote) return kRemoteFailure;
    return aborted ? kSolverAborted : kFailed;
  }
  return kOk;
}

int cmd_growth(const Common& common, const GrowthOptions& opts, RunManifest& manifest) {
  auto sizes = opts.sizes;
  std::sort(sizes.begin(), sizes.end());
  const auto reports = measure_build_growth(sizes, opts.trials, common.seed);
  const fs::path path = fs::path(common.out) / "growth.csv";
  auto out = open_output(path);
  write_growth_csv(out, reports);
  write_growth_csv(std::cout, reports);
  manifest.add_artifact(path);
  return kOk;
}

}  // namespace carpool::cli

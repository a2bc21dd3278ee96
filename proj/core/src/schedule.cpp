#include "carpool/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "carpool/errors.hpp"
#include "carpool/eval.hpp"
#include "carpool/model.hpp"
#include "carpool/random.hpp"
#include "carpool/solver.hpp"

namespace carpool {

TemperatureSchedule make_schedule(std::string_view name) {
  if (name == "fall") return {"fall", {1.0, 0.1, 0.01}};
  if (name == "rise") return {"rise", {0.01, 0.1, 1.0}};
  if (name == "rise_then_fall") return {"rise_then_fall", {0.01, 1.0, 0.01}};
  if (name == "constant") return {"constant", {0.01, 0.01, 0.01}};
  if (name == "single") return {"single", {0.01}};
  throw ConfigError("unknown temperature schedule '" + std::string(name) +
                    "' (expected fall, rise, rise_then_fall, constant or single)");
}

TemperatureSchedule custom_schedule(std::string name, std::vector<double> temperatures) {
  if (temperatures.empty()) throw ConfigError("temperature schedule must have at least one round");
  for (double t : temperatures) {
    if (!std::isfinite(t) || t < 0.0) throw ConfigError("temperatures must be finite and non-negative");
  }
  return {std::move(name), std::move(temperatures)};
}

std::string_view to_string(RoundOutcome outcome) {
  switch (outcome) {
    case RoundOutcome::kFeasible:
      return "feasible";
    case RoundOutcome::kInfeasible:
      return "infeasible";
    case RoundOutcome::kParseError:
      return "parse_error";
  }
  return "unknown";
}

namespace {

struct PoolEntry {
  Assignment solution;
  double objective;
  std::size_t round;
};

}  // namespace

ScheduleRun run_schedule(const DispatchInstance& inst, const TemperatureSchedule& schedule, Proposer& proposer,
                         std::optional<double> optimal_ref, std::uint64_t seed, const ScheduleConfig& config) {
  if (schedule.temperatures.empty()) throw ConfigError("temperature schedule is empty");

  ScheduleRun run;
  run.instance_id = inst.id;
  run.schedule = schedule;
  const double lower_bound = root_lower_bound(build_model(inst).model);

  // Distinct feasible solutions, kept sorted by objective then discovery.
  std::vector<PoolEntry> pool;

  for (std::size_t t = 0; t < schedule.temperatures.size(); ++t) {
    RoundRecord rec;
    rec.round = t + 1;
    rec.temperature = schedule.temperatures[t];

    std::vector<Exemplar> exemplars;
    for (std::size_t e = 0; e < pool.size() && e < config.max_exemplars; ++e) {
      const double gap = pool[e].objective > 0.0
                             ? std::clamp((pool[e].objective - lower_bound) / pool[e].objective, 0.0, 1.0)
                             : 0.0;
      exemplars.push_back(Exemplar{pool[e].solution, gap, pool[e].objective});
      rec.exemplar_objectives.push_back(pool[e].objective);
    }
    ProposerRequest request{render_prompt(inst, exemplars, config.prompt_template), rec.temperature,
                            sub_seed(seed, "proposer", rec.round), rec.round};
    rec.prompt_hash = request.prompt.hash();

    ProposerResponse response;
    try {
      response = proposer.propose(request);
    } catch (const ProposerError& e) {
      run.error = e.what();
      break;
    }
    rec.raw_text = response.text;
    rec.retry_count = response.retry_count;

    try {
      auto parsed = parse_solution(response.text, inst);
      rec.solution = parsed.assignment;
      const auto report = validate(inst, parsed.assignment);
      if (report.feasible()) {
        rec.outcome = RoundOutcome::kFeasible;
        rec.objective = evaluate_objective(inst, parsed.assignment);
        if (optimal_ref) rec.eval_gap = eval_gap(*rec.objective, *optimal_ref);
      } else {
        rec.outcome = RoundOutcome::kInfeasible;
        rec.detail = report.violations.front().detail;
      }
    } catch (const ParseError& e) {
      rec.detail = e.what();
    } catch (const BoundsError& e) {
      rec.detail = e.what();
    }

    if (rec.outcome == RoundOutcome::kFeasible) {
      const auto& sol = *rec.solution;
      const bool seen = std::any_of(pool.begin(), pool.end(), [&](const PoolEntry& p) { return p.solution == sol; });
      if (!seen) {
        PoolEntry entry{sol, *rec.objective, rec.round};
        auto pos = std::upper_bound(pool.begin(), pool.end(), entry.objective,
                                    [](double obj, const PoolEntry& p) { return obj < p.objective; });
        pool.insert(pos, std::move(entry));
      }
      if (!run.best || *rec.objective < run.best->objective - kObjectiveTolerance) {
        run.best = BestSolution{sol, *rec.objective, rec.eval_gap, rec.round};
      }
    }
    const bool hit_optimal = optimal_ref && rec.objective && *rec.objective <= *optimal_ref + kObjectiveTolerance;
    run.rounds.push_back(std::move(rec));
    if (config.stop_on_optimal && hit_optimal) break;
  }
  return run;
}

nlohmann::json to_json(const ScheduleRun& run) {
  auto rounds = nlohmann::json::array();
  for (const auto& r : run.rounds) {
    nlohmann::json item{{"round", r.round},
                        {"temperature", r.temperature},
                        {"prompt_hash", r.prompt_hash},
                        {"exemplar_objectives", r.exemplar_objectives},
                        {"raw_text", r.raw_text},
                        {"outcome", to_string(r.outcome)},
                        {"detail", r.detail},
                        {"retry_count", r.retry_count}};
    item["solution"] = r.solution ? nlohmann::json(*r.solution) : nlohmann::json(nullptr);
    item["objective"] = r.objective ? nlohmann::json(*r.objective) : nlohmann::json(nullptr);
    item["eval_gap"] = r.eval_gap ? nlohmann::json(*r.eval_gap) : nlohmann::json(nullptr);
    rounds.push_back(std::move(item));
  }
  nlohmann::json j{{"instance_id", run.instance_id},
                   {"schedule", {{"name", run.schedule.name}, {"temperatures", run.schedule.temperatures}}},
                   {"rounds", std::move(rounds)}};
  if (run.best) {
    j["best"] = {{"solution", run.best->solution},
                 {"objective", run.best->objective},
                 {"round", run.best->round},
                 {"eval_gap", run.best->eval_gap ? nlohmann::json(*run.best->eval_gap) : nlohmann::json(nullptr)}};
  } else {
    j["best"] = nullptr;
  }
  j["error"] = run.error ? nlohmann::json(*run.error) : nlohmann::json(nullptr);
  return j;
}

}  // namespace carpool

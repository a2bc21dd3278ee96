#include "carpool/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <thread>

#include "carpool/errors.hpp"
#include "carpool/model.hpp"

namespace carpool {
namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

double reference_gap(const SolveResult& solve, double optimal, std::size_t k) {
  double best = 1.0;
  for (const auto& inc : first_k_incumbents(solve, k)) best = std::min(best, eval_gap(inc.objective, optimal));
  return best;
}

}  // namespace

double eval_gap(double objective, double optimal) {
  if (objective < 0.0) throw ConsistencyError("negative objective " + std::to_string(objective));
  if (objective < optimal - kObjectiveTolerance) {
    throw ConsistencyError("objective " + std::to_string(objective) + " below optimal " + std::to_string(optimal));
  }
  if (std::abs(objective - optimal) <= kObjectiveTolerance || objective == 0.0) return 0.0;
  return (objective - optimal) / objective;
}

GapRecord make_gap_record(const ScheduleRun& run, const SolveResult& solve, std::size_t scale, std::size_t k) {
  if (solve.status != SolveStatus::kOptimal) {
    throw ConfigError("instance " + run.instance_id + " was not solved to optimality");
  }
  const double optimal = solve.incumbents.back().objective;
  GapRecord rec;
  rec.instance_id = run.instance_id;
  rec.scale = scale;
  rec.reference_gap = reference_gap(solve, optimal, k);
  if (run.best) rec.proposer_best_gap = eval_gap(run.best->objective, optimal);
  return rec;
}

ScoreReport score_records(const std::string& schedule, const std::vector<GapRecord>& records) {
  if (records.empty()) throw ConfigError("cannot score an empty run list");
  ScoreReport report;
  report.schedule = schedule;
  report.count = records.size();
  std::size_t wins = 0;
  for (const auto& r : records) {
    report.wins.push_back(r.win());
    wins += r.win() ? 1 : 0;
  }
  report.average_score = static_cast<double>(wins) / static_cast<double>(records.size());
  return report;
}

ScoreReport quality_score(const std::vector<std::pair<ScheduleRun, SolveResult>>& runs) {
  if (runs.empty()) throw ConfigError("cannot score an empty run list");
  std::vector<GapRecord> records;
  for (const auto& [run, solve] : runs) records.push_back(make_gap_record(run, solve, 0));
  return score_records(runs.front().first.schedule.name, records);
}

std::vector<SolvedInstance> solve_all(const std::vector<DispatchInstance>& instances, const SolveLimits& limits,
                                      std::size_t jobs) {
  std::vector<SolvedInstance> out(instances.size());
  parallel_for(instances.size(), jobs, [&](std::size_t i) {
    out[i].instance = instances[i];
    out[i].solve = solve_exact(build_model(instances[i]).model, limits);
  });
  return out;
}

AblationReport ablation_report(const std::vector<SolvedInstance>& instances,
                               const std::vector<TemperatureSchedule>& schedules, Proposer& proposer,
                               std::uint64_t seed, std::size_t jobs, const ScheduleConfig& config) {
  if (instances.empty()) throw ConfigError("ablation needs at least one instance");
  if (schedules.empty()) throw ConfigError("ablation needs at least one schedule");

  const std::size_t ns = schedules.size();
  std::vector<AblationRow> rows(instances.size() * ns);
  std::vector<std::optional<GapRecord>> records(rows.size());

  parallel_for(instances.size(), jobs, [&](std::size_t i) {
    const auto& item = instances[i];
    const std::uint64_t instance_seed = sub_seed(seed, "instance", i);
    for (std::size_t s = 0; s < ns; ++s) {
      auto& row = rows[i * ns + s];
      row.instance_id = item.instance.id;
      row.scale = item.instance.scale();
      row.schedule = schedules[s].name;
      try {
        if (item.solve.status != SolveStatus::kOptimal) {
          throw ConfigError("reference solve status " + std::string(to_string(item.solve.status)));
        }
        const double optimal = item.solve.incumbents.back().objective;
        row.optimal = optimal;
        const auto run = run_schedule(item.instance, schedules[s], proposer, optimal, instance_seed, config);
        const auto rec = make_gap_record(run, item.solve, row.scale);
        row.reference_gap = rec.reference_gap;
        if (run.best) {
          row.best_objective = run.best->objective;
          row.gap = rec.proposer_best_gap;
        }
        if (run.error) {
          row.error = *run.error;
          continue;
        }
        row.win = rec.win();
        records[i * ns + s] = rec;
      } catch (const Error& e) {
        row.error = e.what();
      }
    }
  });

  AblationReport report;
  report.seed = seed;
  report.rows = std::move(rows);
  for (const auto& row : report.rows) report.errors += row.error.empty() ? 0 : 1;
  for (std::size_t s = 0; s < ns; ++s) {
    std::vector<GapRecord> recs;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const auto& row = report.rows[i * ns + s];
      // A failed instance scores as a loss.
      recs.push_back(records[i * ns + s].value_or(GapRecord{row.instance_id, std::nullopt, 0.0, row.scale}));
    }
    report.scores.push_back(score_records(schedules[s].name, recs));
  }
  return report;
}

void write_ablation_csv(std::ostream& out, const AblationReport& report) {
  out << "instance_id,scale,schedule,best_objective,optimal,gap,win,error\n";
  for (const auto& r : report.rows) {
    std::string error = r.error;
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    out << r.instance_id << ',' << r.scale << ',' << r.schedule << ','
        << (r.best_objective ? fmt(*r.best_objective) : "") << ',' << (r.optimal ? fmt(*r.optimal) : "") << ','
        << (r.gap ? fmt(*r.gap) : "") << ',' << (r.win ? 1 : 0) << ',' << error << '\n';
  }
}

void write_scale_csv(std::ostream& out, const AblationReport& report) {
  std::string target = report.scores.empty() ? "" : report.scores.front().schedule;
  for (const auto& s : report.scores) {
    if (s.schedule == "fall") target = "fall";
  }
  struct Bucket {
    double proposer_sum = 0.0;
    std::size_t proposer_count = 0;
    double reference_sum = 0.0;
    std::size_t reference_count = 0;
  };
  std::map<std::size_t, Bucket> buckets;
  for (const auto& r : report.rows) {
    if (r.schedule != target || !r.optimal) continue;
    auto& b = buckets[r.scale / 5 * 5];
    if (r.gap) {
      b.proposer_sum += *r.gap;
      ++b.proposer_count;
    }
    b.reference_sum += r.reference_gap;
    ++b.reference_count;
  }
  out << "scale,proposer_gap,reference_gap\n";
  for (const auto& [scale, b] : buckets) {
    out << scale << ',' << (b.proposer_count ? fmt(b.proposer_sum / b.proposer_count) : "") << ','
        << fmt(b.reference_sum / b.reference_count) << '\n';
  }
}

void write_score_table(std::ostream& out, const AblationReport& report) {
  out << "Average solution quality score (reference: in-repo branch-and-bound, first "
      << kReferenceIncumbents << " incumbents)\n";
  out << "| Strategy        | Average Score | Instances |\n";
  out << "|-----------------|---------------|-----------|\n";
  for (const auto& s : report.scores) {
    char line[128];
    std::snprintf(line, sizeof line, "| %-15s | %13.3f | %9zu |\n", s.schedule.c_str(), s.average_score, s.count);
    out << line;
  }
}

nlohmann::json summary_json(const AblationReport& report) {
  auto schedules = nlohmann::json::array();
  for (const auto& s : report.scores) {
    const auto wins = static_cast<std::size_t>(std::count(s.wins.begin(), s.wins.end(), true));
    schedules.push_back({{"name", s.schedule}, {"average_score", s.average_score}, {"instances", s.count}, {"wins", wins}});
  }
  return nlohmann::json{{"reference_solver", "in-repo branch-and-bound (first 3 incumbents)"},
                        {"seed", report.seed},
                        {"errors", report.errors},
                        {"schedules", std::move(schedules)}};
}

}  // namespace carpool

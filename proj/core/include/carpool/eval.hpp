#pragma once

#include <cstddef>
#include <cstdint>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "carpool/instance.hpp"
#include "carpool/random.hpp"
#include "carpool/schedule.hpp"
#include "carpool/solver.hpp"

namespace carpool {

/// (objective - optimal) / objective, 0 when the two agree within 1e-9.
/// Throws ConsistencyError when objective < optimal - 1e-9 or objective < 0.
double eval_gap(double objective, double optimal);

/// Gaps closer than this are a tie.
inline constexpr double kGapTieTolerance = 1e-9;

/// How many solver incumbents the proposer is compared against.
inline constexpr std::size_t kReferenceIncumbents = 3;

struct GapRecord {
  std::string instance_id;
  std::optional<double> proposer_best_gap;  // absent: no feasible proposal
  double reference_gap = 0.0;               // best of the first k incumbents
  std::size_t scale = 0;                    // m + n + p

  /// Strictly smaller gap; ties and missing proposals lose.
  bool win() const noexcept {
    return proposer_best_gap && *proposer_best_gap < reference_gap - kGapTieTolerance;
  }
};

struct ScoreReport {
  std::string schedule;
  std::vector<bool> wins;
  double average_score = 0.0;
  std::size_t count = 0;
};

/// Both gaps against the optimum in `solve`, which must be optimal.
GapRecord make_gap_record(const ScheduleRun& run, const SolveResult& solve, std::size_t scale,
                          std::size_t k = kReferenceIncumbents);

/// Throws ConfigError on an empty list.
ScoreReport score_records(const std::string& schedule, const std::vector<GapRecord>& records);

/// Throws ConfigError on an empty list or a non-optimal SolveResult.
ScoreReport quality_score(const std::vector<std::pair<ScheduleRun, SolveResult>>& runs);

/// Seeded Fisher-Yates shuffle, then the first round(fraction * N) items
/// form the test split. Returns {train, test}.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_dataset(std::vector<T> items, double test_fraction,
                                                        std::uint64_t seed);

struct SolvedInstance {
  DispatchInstance instance;
  SolveResult solve;
};

/// Solves every instance with solve_exact; `jobs` worker threads.
std::vector<SolvedInstance> solve_all(const std::vector<DispatchInstance>& instances, const SolveLimits& limits,
                                      std::size_t jobs = 1);

struct AblationRow {
  std::string instance_id;
  std::size_t scale = 0;
  std::string schedule;
  std::optional<double> best_objective;
  std::optional<double> optimal;
  std::optional<double> gap;
  double reference_gap = 0.0;
  bool win = false;
  std::string error;
};

struct AblationReport {
  std::vector<ScoreReport> scores;  // one per schedule, in request order
  std::vector<AblationRow> rows;    // instance-major, schedule-minor
  std::size_t errors = 0;
  std::uint64_t seed = 0;
};

/// Runs every schedule on every instance. Each instance gets one proposer
/// seed shared by all schedules. Per-instance failures land in the row's
/// error column and count as losses. Throws ConfigError on no instances.
AblationReport ablation_report(const std::vector<SolvedInstance>& instances,
                               const std::vector<TemperatureSchedule>& schedules, Proposer& proposer,
                               std::uint64_t seed, std::size_t jobs = 1, const ScheduleConfig& config = {});

/// `instance_id,scale,schedule,best_objective,optimal,gap,win,error`
void write_ablation_csv(std::ostream& out, const AblationReport& report);
/// `scale,proposer_gap,reference_gap`, buckets of width 5 over m+n+p, for
/// the fall schedule (or the first schedule when fall was not run).
void write_scale_csv(std::ostream& out, const AblationReport& report);
/// Strategy / average-score table with the reference solver named.
void write_score_table(std::ostream& out, const AblationReport& report);
nlohmann::json summary_json(const AblationReport& report);

template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_dataset(std::vector<T> items, double test_fraction,
                                                        std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  rng.shuffle(items);
  const auto test_size = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(items.size())));
  std::vector<T> test(std::make_move_iterator(items.begin()),
                      std::make_move_iterator(items.begin() + static_cast<std::ptrdiff_t>(test_size)));
  std::vector<T> train(std::make_move_iterator(items.begin() + static_cast<std::ptrdiff_t>(test_size)),
                       std::make_move_iterator(items.end()));
  return {std::move(train), std::move(test)};
}

}  // namespace carpool

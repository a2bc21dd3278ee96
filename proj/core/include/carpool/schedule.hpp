#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "carpool/assignment.hpp"
#include "carpool/prompt.hpp"
#include "carpool/proposer.hpp"

namespace carpool {

struct TemperatureSchedule {
  std::string name;
  std::vector<double> temperatures;

  friend bool operator==(const TemperatureSchedule&, const TemperatureSchedule&) = default;
};

inline constexpr std::array<std::string_view, 5> kScheduleNames = {"single", "constant", "rise_then_fall",
                                                                    "rise", "fall"};

/// fall [1, 0.1, 0.01], rise [0.01, 0.1, 1], rise_then_fall [0.01, 1, 0.01],
/// constant [0.01, 0.01, 0.01], single [0.01]. Unknown names throw ConfigError.
TemperatureSchedule make_schedule(std::string_view name);

/// An explicit temperature list; throws ConfigError when empty or negative.
TemperatureSchedule custom_schedule(std::string name, std::vector<double> temperatures);

struct ScheduleConfig {
  std::size_t max_exemplars = 3;
  bool stop_on_optimal = false;  // stop once a round matches optimal_ref
  PromptTemplate prompt_template{};
};

enum class RoundOutcome { kFeasible, kInfeasible, kParseError };

std::string_view to_string(RoundOutcome outcome);

struct RoundRecord {
  std::size_t round = 0;  // 1-based
  double temperature = 0.0;
  std::string prompt_hash;
  std::vector<double> exemplar_objectives;  // exemplars shown in this round's prompt, best first
  std::string raw_text;
  RoundOutcome outcome = RoundOutcome::kParseError;
  std::string detail;  // parse error or first violation
  std::optional<Assignment> solution;
  std::optional<double> objective;  // feasible rounds only
  std::optional<double> eval_gap;   // when an optimal reference was supplied
  int retry_count = 0;
};

struct BestSolution {
  Assignment solution;
  double objective = 0.0;
  std::optional<double> eval_gap;
  std::size_t round = 0;
};

struct ScheduleRun {
  std::string instance_id;
  TemperatureSchedule schedule;
  std::vector<RoundRecord> rounds;
  std::optional<BestSolution> best;
  std::optional<std::string> error;  // proposer failure that ended the run early
};

/// Recursive refinement: round t prompts with the best distinct feasible
/// solutions found in rounds before t (at most max_exemplars, best first),
/// asks the proposer at the round's temperature, then parses and validates
/// the answer. Unparsable or infeasible rounds still use up their slot.
/// Exemplar gaps are relative to the instance's root lower bound. A
/// ProposerError stops the run and is recorded in `error`.
ScheduleRun run_schedule(const DispatchInstance& inst, const TemperatureSchedule& schedule, Proposer& proposer,
                         std::optional<double> optimal_ref, std::uint64_t seed, const ScheduleConfig& config = {});

nlohmann::json to_json(const ScheduleRun& run);

}  // namespace carpool

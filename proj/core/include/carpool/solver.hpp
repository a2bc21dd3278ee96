#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "carpool/assignment.hpp"
#include "carpool/model.hpp"

namespace carpool {

struct SolveLimits {
  std::uint64_t node_limit = 10'000'000;
  std::chrono::milliseconds time_limit{60'000};
};

enum class SolveStatus { kOptimal, kInfeasible, kAborted };

std::string_view to_string(SolveStatus status);

/// An improving feasible solution, in discovery order.
struct Incumbent {
  Assignment solution;
  double objective = 0.0;
  std::size_t found_order = 0;  // 1 = first feasible solution found
  double solver_gap = 0.0;      // (objective - lower bound) / objective
  std::uint64_t node = 0;       // node count at discovery
  std::chrono::nanoseconds wall_time{0};
};

struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<Incumbent> incumbents;
  std::optional<Assignment> optimal;
  std::uint64_t nodes_explored = 0;
  double root_bound = 0.0;
  double proof_gap = 0.0;  // 0 when optimal

  /// Objective of the best incumbent, if any.
  std::optional<double> best_objective() const;
};

/// Depth-first branch-and-bound.
///
/// Branches on which service covers the lowest-index uncovered user, trying
/// options cheapest first (ties: lower column first). The bound adds, for
/// every uncovered user, the cheapest per-user share of any option still
/// available to it; a Y option's cost is split evenly between its two
/// users, so no cost is counted twice and the bound stays admissible.
/// Nodes whose bound reaches the incumbent minus 1e-9 are pruned.
SolveResult solve_exact(const MipModel& model, const SolveLimits& limits = {});

/// Which entities a partial solution has already consumed.
struct PartialState {
  std::vector<bool> user_covered;
  std::vector<bool> empty_used;
  std::vector<bool> one_order_used;

  static PartialState root(const MipModel& model);
};

/// Lower bound on the cost of completing `state` (cost so far excluded).
double completion_bound(const MipModel& model, const PartialState& state);

inline double root_lower_bound(const MipModel& model) {
  return completion_bound(model, PartialState::root(model));
}

struct BruteForceLimits {
  /// Refuse instances with more than this many user-to-vehicle maps.
  std::uint64_t max_maps = 1'000'000;
};

/// Exhaustive oracle: enumerates every user-to-vehicle map that respects
/// capacities, and both pickup orders for every shared empty vehicle.
/// Works from the instance directly, not the model. Throws
/// CapacityExceededError beyond `limits`.
SolveResult brute_force(const DispatchInstance& inst, const BruteForceLimits& limits = {});

/// The first min(k, size) incumbents.
std::vector<Incumbent> first_k_incumbents(const SolveResult& result, std::size_t k);

/// Timing fields are omitted unless `include_timing`, so identical solves
/// serialise byte-identically.
nlohmann::json to_json(const SolveResult& result, bool include_timing = false);
SolveResult solve_result_from_json(const nlohmann::json& j);

}  // namespace carpool

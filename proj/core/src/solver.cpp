#include "carpool/solver.hpp"

#include <algorithm>
#include <limits>

#include "carpool/errors.hpp"

namespace carpool {
namespace {

using Clock = std::chrono::steady_clock;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

double relative_gap(double objective, double bound) {
  if (objective <= 0.0) return 0.0;
  return std::clamp((objective - bound) / objective, 0.0, 1.0);
}

// One way of serving a user: the column, its cost, the vehicle it occupies
// and, for Y, the other user it covers.
struct Option {
  std::size_t col;
  double cost;
  bool empty_vehicle;
  std::size_t vehicle;
  std::size_t partner;  // kNone unless Y
  double share;         // cost attributed to each covered user
};

struct OptionTable {
  // by_cost[j]: options covering j, ascending cost then column.
  // by_share[j]: same options, ascending share then column.
  std::vector<std::vector<Option>> by_cost;
  std::vector<std::vector<Option>> by_share;

  explicit OptionTable(const MipModel& model) : by_cost(model.p), by_share(model.p) {
    for (std::size_t c = 0; c < model.variables.size(); ++c) {
      const auto& v = model.variables[c];
      const double cost = model.objective[c];
      switch (v.kind) {
        case VarKind::kX:
          by_cost[v.j].push_back({c, cost, true, v.i, kNone, cost});
          break;
        case VarKind::kY:
          by_cost[v.j].push_back({c, cost, true, v.i, *v.k, cost / 2});
          by_cost[*v.k].push_back({c, cost, true, v.i, v.j, cost / 2});
          break;
        case VarKind::kZ:
          by_cost[v.j].push_back({c, cost, false, v.i, kNone, cost});
          break;
      }
    }
    for (std::size_t j = 0; j < model.p; ++j) {
      by_share[j] = by_cost[j];
      std::sort(by_cost[j].begin(), by_cost[j].end(), [](const Option& a, const Option& b) {
        return a.cost != b.cost ? a.cost < b.cost : a.col < b.col;
      });
      std::sort(by_share[j].begin(), by_share[j].end(), [](const Option& a, const Option& b) {
        return a.share != b.share ? a.share < b.share : a.col < b.col;
      });
    }
  }
};

bool available(const Option& o, const PartialState& s) {
  if (o.empty_vehicle ? s.empty_used[o.vehicle] : s.one_order_used[o.vehicle]) return false;
  return o.partner == kNone || !s.user_covered[o.partner];
}

double bound_from_table(const OptionTable& table, const PartialState& s) {
  double total = 0.0;
  for (std::size_t u = 0; u < table.by_share.size(); ++u) {
    if (s.user_covered[u]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : table.by_share[u]) {
      if (available(o, s)) {
        best = o.share;
        break;
      }
    }
    total += best;
  }
  return total;
}

class BranchAndBound {
 public:
  BranchAndBound(const MipModel& model, const SolveLimits& limits)
      : model_(model), limits_(limits), table_(model), state_(PartialState::root(model)) {}

  SolveResult run() {
    start_ = Clock::now();
    result_.root_bound = bound_from_table(table_, state_);
    if (model_.p > 2 * model_.m + model_.n) {
      result_.status = SolveStatus::kInfeasible;
      return result_;
    }
    dive(0, 0.0);
    if (aborted_) {
      result_.status = SolveStatus::kAborted;
      if (auto best = result_.best_objective()) result_.proof_gap = relative_gap(*best, result_.root_bound);
      else result_.proof_gap = 1.0;
    } else if (result_.incumbents.empty()) {
      result_.status = SolveStatus::kInfeasible;
    } else {
      result_.status = SolveStatus::kOptimal;
      result_.optimal = result_.incumbents.back().solution;
      result_.proof_gap = 0.0;
    }
    return result_;
  }

 private:
  bool out_of_budget() {
    if (result_.nodes_explored >= limits_.node_limit) return true;
    if ((result_.nodes_explored & 1023) == 0 && Clock::now() - start_ >= limits_.time_limit) return true;
    return false;
  }

  void record_incumbent(double cost) {
    Incumbent inc;
    inc.solution = model_.to_assignment(chosen_);
    inc.objective = cost;
    inc.found_order = result_.incumbents.size() + 1;
    inc.solver_gap = relative_gap(cost, result_.root_bound);
    inc.node = result_.nodes_explored;
    inc.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start_);
    result_.incumbents.push_back(std::move(inc));
    best_ = cost;
  }

  void dive(std::size_t next_user, double cost) {
    if (aborted_) return;
    if (out_of_budget()) {
      aborted_ = true;
      return;
    }
    ++result_.nodes_explored;

    while (next_user < model_.p && state_.user_covered[next_user]) ++next_user;
    if (next_user == model_.p) {
      if (cost < best_ - kObjectiveTolerance) record_incumbent(cost);
      return;
    }
    if (cost + bound_from_table(table_, state_) >= best_ - kObjectiveTolerance) return;

    for (const auto& o : table_.by_cost[next_user]) {
      if (!available(o, state_)) continue;
      if (cost + o.cost >= best_ - kObjectiveTolerance) break;  // sorted by cost
      set(o, next_user, true);
      chosen_.push_back(o.col);
      dive(next_user + 1, cost + o.cost);
      chosen_.pop_back();
      set(o, next_user, false);
      if (aborted_) return;
    }
  }

  void set(const Option& o, std::size_t user, bool value) {
    (o.empty_vehicle ? state_.empty_used : state_.one_order_used)[o.vehicle] = value;
    state_.user_covered[user] = value;
    if (o.partner != kNone) state_.user_covered[o.partner] = value;
  }

  const MipModel& model_;
  SolveLimits limits_;
  OptionTable table_;
  PartialState state_;
  std::vector<std::size_t> chosen_;
  SolveResult result_;
  double best_ = std::numeric_limits<double>::infinity();
  bool aborted_ = false;
  Clock::time_point start_;
};

// Enumeration oracle. Shares nothing with the model or the branch-and-bound
// option table: it works on raw coordinates and core::evaluate_objective.
class Enumerator {
 public:
  explicit Enumerator(const DispatchInstance& inst)
      : inst_(inst), owner_(inst.p()), load_(inst.m() + inst.n(), 0) {}

  SolveResult run() {
    start_ = Clock::now();
    assign(0);
    if (result_.incumbents.empty()) {
      result_.status = SolveStatus::kInfeasible;
    } else {
      result_.status = SolveStatus::kOptimal;
      result_.optimal = result_.incumbents.back().solution;
    }
    return result_;
  }

 private:
  std::size_t capacity(std::size_t v) const { return v < inst_.m() ? 2 : 1; }

  void assign(std::size_t u) {
    if (u == inst_.p()) {
      expand_orders();
      return;
    }
    for (std::size_t v = 0; v < load_.size(); ++v) {
      if (load_[v] == capacity(v)) continue;
      owner_[u] = v;
      ++load_[v];
      assign(u + 1);
      --load_[v];
    }
  }

  // For every empty vehicle with two users, both pickup orders are tried.
  void expand_orders() {
    std::vector<std::vector<std::size_t>> riders(load_.size());
    for (std::size_t u = 0; u < owner_.size(); ++u) riders[owner_[u]].push_back(u);
    std::vector<std::size_t> shared;
    for (std::size_t v = 0; v < inst_.m(); ++v) {
      if (riders[v].size() == 2) shared.push_back(v);
    }
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << shared.size()); ++mask) {
      Assignment sol;
      for (std::size_t v = 0; v < load_.size(); ++v) {
        const auto& r = riders[v];
        if (r.empty()) continue;
        if (v >= inst_.m()) {
          sol.z.insert({v - inst_.m(), r[0]});
        } else if (r.size() == 1) {
          sol.x.insert({v, r[0]});
        }
      }
      for (std::size_t s = 0; s < shared.size(); ++s) {
        const auto& r = riders[shared[s]];
        const bool flip = (mask >> s) & 1;
        sol.y.insert({shared[s], flip ? r[1] : r[0], flip ? r[0] : r[1]});
      }
      ++result_.nodes_explored;
      const double cost = evaluate_objective(inst_, sol);
      if (cost < best_ - kObjectiveTolerance) {
        Incumbent inc;
        inc.objective = cost;
        inc.found_order = result_.incumbents.size() + 1;
        inc.solver_gap = relative_gap(cost, 0.0);
        inc.node = result_.nodes_explored;
        inc.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start_);
        inc.solution = std::move(sol);
        result_.incumbents.push_back(std::move(inc));
        best_ = cost;
      }
    }
  }

  const DispatchInstance& inst_;
  std::vector<std::size_t> owner_;
  std::vector<std::size_t> load_;
  SolveResult result_;
  double best_ = std::numeric_limits<double>::infinity();
  Clock::time_point start_;
};

}  // namespace

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kAborted:
      return "aborted";
  }
  return "unknown";
}

std::optional<double> SolveResult::best_objective() const {
  if (incumbents.empty()) return std::nullopt;
  return incumbents.back().objective;
}

PartialState PartialState::root(const MipModel& model) {
  return PartialState{std::vector<bool>(model.p, false), std::vector<bool>(model.m, false),
                      std::vector<bool>(model.n, false)};
}

double completion_bound(const MipModel& model, const PartialState& state) {
  return bound_from_table(OptionTable(model), state);
}

SolveResult solve_exact(const MipModel& model, const SolveLimits& limits) {
  return BranchAndBound(model, limits).run();
}

SolveResult brute_force(const DispatchInstance& inst, const BruteForceLimits& limits) {
  double maps = 1.0;
  for (std::size_t u = 0; u < inst.p(); ++u) maps *= static_cast<double>(inst.m() + inst.n());
  if (inst.p() > 0 && maps > static_cast<double>(limits.max_maps)) {
    throw CapacityExceededError("brute force refused: (m+n)^p = " + std::to_string(maps) +
                                " exceeds " + std::to_string(limits.max_maps));
  }
  return Enumerator(inst).run();
}

std::vector<Incumbent> first_k_incumbents(const SolveResult& result, std::size_t k) {
  const auto count = std::min(k, result.incumbents.size());
  return {result.incumbents.begin(), result.incumbents.begin() + static_cast<std::ptrdiff_t>(count)};
}

nlohmann::json to_json(const SolveResult& result, bool include_timing) {
  auto incumbents = nlohmann::json::array();
  for (const auto& inc : result.incumbents) {
    nlohmann::json item{{"found_order", inc.found_order},
                        {"objective", inc.objective},
                        {"solver_gap", inc.solver_gap},
                        {"node", inc.node},
                        {"solution", inc.solution}};
    if (include_timing) item["wall_ns"] = inc.wall_time.count();
    incumbents.push_back(std::move(item));
  }
  nlohmann::json j{{"status", to_string(result.status)},
                   {"nodes_explored", result.nodes_explored},
                   {"root_bound", result.root_bound},
                   {"proof_gap", result.proof_gap},
                   {"incumbents", std::move(incumbents)}};
  if (result.optimal) {
    j["optimal"] = *result.optimal;
    j["optimal_objective"] = result.incumbents.back().objective;
  } else {
    j["optimal"] = nullptr;
  }
  return j;
}

SolveResult solve_result_from_json(const nlohmann::json& j) {
  SolveResult r;
  const auto status = j.at("status").get<std::string>();
  if (status == "optimal") r.status = SolveStatus::kOptimal;
  else if (status == "infeasible") r.status = SolveStatus::kInfeasible;
  else if (status == "aborted") r.status = SolveStatus::kAborted;
  else throw ParseError("unknown solve status '" + status + "'");
  r.nodes_explored = j.value("nodes_explored", std::uint64_t{0});
  r.root_bound = j.value("root_bound", 0.0);
  r.proof_gap = j.value("proof_gap", 0.0);
  for (const auto& item : j.at("incumbents")) {
    Incumbent inc;
    inc.found_order = item.at("found_order").get<std::size_t>();
    inc.objective = item.at("objective").get<double>();
    inc.solver_gap = item.value("solver_gap", 0.0);
    inc.node = item.value("node", std::uint64_t{0});
    inc.wall_time = std::chrono::nanoseconds(item.value("wall_ns", std::int64_t{0}));
    inc.solution = item.at("solution").get<Assignment>();
    r.incumbents.push_back(std::move(inc));
  }
  if (j.contains("optimal") && !j["optimal"].is_null()) r.optimal = j["optimal"].get<Assignment>();
  return r;
}

}  // namespace carpool

#include "carpool/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include "carpool/errors.hpp"
#include "carpool/model.hpp"
#include "carpool/random.hpp"

namespace carpool {

RoadNetwork::RoadNetwork(int width, int height, std::vector<Cell> blocked, Point origin,
                         double cell_size)
    : width_(width), height_(height), origin_(origin), cell_size_(cell_size) {
  if (width <= 0 || height <= 0) throw ConfigError("grid dimensions must be positive");
  if (!(cell_size > 0.0)) throw ConfigError("cell size must be positive");
  blocked_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), false);
  for (const auto& c : blocked) {
    if (!in_bounds(c)) throw ConfigError("blocked cell outside grid");
    blocked_[index(c)] = true;
  }
  if (std::all_of(blocked_.begin(), blocked_.end(), [](bool b) { return b; })) {
    throw ConfigError("road network has no unblocked cell");
  }
}

Point RoadNetwork::to_point(Cell c) const noexcept {
  return {origin_.x + c.col * cell_size_, origin_.y + c.row * cell_size_};
}

bool RoadNetwork::contains(const Point& pt) const noexcept {
  const double fx = (pt.x - origin_.x) / cell_size_;
  const double fy = (pt.y - origin_.y) / cell_size_;
  return fx >= 0.0 && fy >= 0.0 && fx <= width_ - 1 && fy <= height_ - 1;
}

Region RoadNetwork::bounds() const noexcept {
  return {origin_.x, origin_.y, origin_.x + (width_ - 1) * cell_size_,
          origin_.y + (height_ - 1) * cell_size_};
}

std::optional<Cell> RoadNetwork::snap(const Point& pt) const {
  if (!contains(pt)) return std::nullopt;
  const double fx = (pt.x - origin_.x) / cell_size_;
  const double fy = (pt.y - origin_.y) / cell_size_;
  std::optional<Cell> best;
  double best_d = std::numeric_limits<double>::infinity();
  // Column-major scan visits cells in (col, row) order, so a strict '<'
  // keeps the lexicographically smallest among ties.
  for (int c = 0; c < width_; ++c) {
    for (int r = 0; r < height_; ++r) {
      if (blocked_[index({c, r})]) continue;
      const double d = std::abs(fx - c) + std::abs(fy - r);
      if (d < best_d) {
        best_d = d;
        best = Cell{c, r};
      }
    }
  }
  return best;
}

Path dijkstra_path(const RoadNetwork& net, Cell from, Cell to) {
  if (!net.passable(from) || !net.passable(to)) throw ConfigError("path endpoint is blocked or outside grid");
  constexpr auto kInf = std::numeric_limits<std::size_t>::max();
  const std::size_t cells = static_cast<std::size_t>(net.width()) * static_cast<std::size_t>(net.height());
  std::vector<std::size_t> dist(cells, kInf);
  std::vector<std::optional<Cell>> pred(cells);

  using Entry = std::pair<std::size_t, Cell>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  dist[net.index(from)] = 0;
  queue.push({0, from});
  static constexpr Cell kSteps[] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};

  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d != dist[net.index(u)]) continue;
    if (u == to) break;
    for (const auto& step : kSteps) {
      const Cell v{u.col + step.col, u.row + step.row};
      if (!net.passable(v)) continue;
      const auto vi = net.index(v);
      const std::size_t nd = d + 1;
      if (nd < dist[vi]) {
        dist[vi] = nd;
        pred[vi] = u;
        queue.push({nd, v});
      } else if (nd == dist[vi] && pred[vi] && u < *pred[vi]) {
        pred[vi] = u;
      }
    }
  }
  if (dist[net.index(to)] == kInf) {
    throw NoPathError("no path from (" + std::to_string(from.col) + "," + std::to_string(from.row) +
                      ") to (" + std::to_string(to.col) + "," + std::to_string(to.row) + ")");
  }
  Path path;
  path.length = dist[net.index(to)];
  for (Cell c = to;; c = *pred[net.index(c)]) {
    path.cells.push_back(c);
    if (c == from) break;
  }
  std::reverse(path.cells.begin(), path.cells.end());
  return path;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& token, const char* column) {
  double value = 0.0;
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), last, value);
  if (token.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw ParseError(std::string("bad ") + column + " '" + token + "'");
  }
  return value;
}

Point snap_point(const Point& pt, const RoadNetwork* net) {
  if (net == nullptr) return pt;
  if (auto cell = net->snap(pt)) return net->to_point(*cell);
  return pt;
}

}  // namespace

IngestResult ingest_orders(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  IngestResult result;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(path + ": missing header row", 1);
  ++lineno;
  if (split_csv(line).empty() || split_csv(line)[0].find("order_id") == std::string::npos) {
    throw ParseError(path + ": header must start with order_id", 1);
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto f = split_csv(line);
      if (f.size() != 6) throw ParseError("expected 6 fields, got " + std::to_string(f.size()));
      OrderEvent ev;
      ev.order_id = f[0];
      ev.request_time = parse_number(f[1], "request_time");
      if (ev.request_time < 0.0) throw ParseError("negative request_time");
      const double plat = parse_number(f[2], "pickup_lat");
      const double plon = parse_number(f[3], "pickup_lon");
      const double dlat = parse_number(f[4], "dropoff_lat");
      const double dlon = parse_number(f[5], "dropoff_lon");
      try {
        ev.pickup = snap_point(mercator_project(plat, plon, options.projection), options.network);
        ev.dropoff = snap_point(mercator_project(dlat, dlon, options.projection), options.network);
      } catch (const ProjectionError& e) {
        throw ProjectionError("line " + std::to_string(lineno) + ": " + e.what());
      }
      result.events.push_back(std::move(ev));
    } catch (const ProjectionError& e) {
      if (!options.skip_malformed) throw;
      result.skipped.push_back(e.what());
    } catch (const ParseError& e) {
      if (!options.skip_malformed) throw ParseError(path + ": " + e.what(), lineno);
      result.skipped.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  std::stable_sort(result.events.begin(), result.events.end(),
                   [](const OrderEvent& a, const OrderEvent& b) { return a.request_time < b.request_time; });
  return result;
}

std::vector<OrderEvent> generate_synthetic_orders(std::uint64_t seed, std::size_t count,
                                                  const Region& region, double time_span) {
  Rng rng(seed);
  std::vector<OrderEvent> out;
  out.reserve(count);
  const double mean_gap = count == 0 ? 0.0 : time_span / static_cast<double>(count);
  double t = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    t += rng.exponential(mean_gap);
    OrderEvent ev;
    ev.order_id = "o" + std::to_string(i);
    ev.request_time = t;
    ev.pickup = {rng.uniform(region.min_x, region.max_x), rng.uniform(region.min_y, region.max_y)};
    ev.dropoff = {rng.uniform(region.min_x, region.max_x), rng.uniform(region.min_y, region.max_y)};
    out.push_back(std::move(ev));
  }
  return out;
}

std::vector<VehicleState> make_fleet(const RoadNetwork& net, std::size_t count, std::uint64_t seed) {
  std::vector<Cell> free_cells;
  for (int c = 0; c < net.width(); ++c) {
    for (int r = 0; r < net.height(); ++r) {
      if (!net.blocked({c, r})) free_cells.push_back({c, r});
    }
  }
  Rng rng(seed);
  rng.shuffle(free_cells);
  std::vector<VehicleState> fleet(count);
  for (std::size_t i = 0; i < count; ++i) {
    fleet[i].id = "v" + std::to_string(i);
    fleet[i].cell = free_cells[i % free_cells.size()];
  }
  return fleet;
}

namespace {

struct OrderState {
  Cell pickup;
  Cell dropoff;
  bool willing = false;
  bool matched = false;
};

class Simulation {
 public:
  Simulation(const RoadNetwork& net, const std::vector<OrderEvent>& orders,
             std::vector<VehicleState> fleet, const SimConfig& cfg,
             const std::function<void(const SnapshotRecord&)>& on_snapshot)
      : net_(net), orders_(orders), fleet_(std::move(fleet)), cfg_(cfg), on_snapshot_(on_snapshot) {
    if (!(cfg.batch_window > 0.0)) throw ConfigError("batch_window must be positive");
    if (!(cfg.vehicle_speed > 0.0)) throw ConfigError("vehicle_speed must be positive");
    if (!(cfg.tick > 0.0)) throw ConfigError("tick must be positive");
    for (const auto& v : fleet_) {
      if (!net.passable(v.cell)) throw ConfigError("vehicle " + v.id + " starts on a blocked cell");
    }
    order_state_.resize(orders.size());
    release_order_.resize(orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) release_order_[i] = i;
    std::stable_sort(release_order_.begin(), release_order_.end(), [&](std::size_t a, std::size_t b) {
      return orders[a].request_time < orders[b].request_time;
    });
    for (std::size_t i = 0; i < orders.size(); ++i) {
      Rng rng(sub_seed(cfg.seed, "share", i));
      order_state_[i].willing = rng.uniform() < cfg.share_willingness;
    }
    result_.summary.orders_total = orders.size();
  }

  SimResult run() {
    double next_round = cfg_.batch_window;
    std::size_t released = 0;
    double t = 0.0;
    // Tick counter avoids drift from repeated floating-point addition.
    for (std::uint64_t step = 1;; ++step) {
      t = static_cast<double>(step) * cfg_.tick;
      if (t > cfg_.horizon) break;
      while (released < release_order_.size() && orders_[release_order_[released]].request_time <= t) {
        admit(release_order_[released++]);
      }
      for (std::size_t v = 0; v < fleet_.size(); ++v) advance(v, t);
      if (t >= next_round) {
        match_round(t);
        next_round += cfg_.batch_window;
      }
      const bool idle = std::all_of(fleet_.begin(), fleet_.end(),
                                    [](const VehicleState& v) { return v.route.empty(); });
      if (released == release_order_.size() && pending_.empty() && idle) break;
      if (fleet_.empty() && released == release_order_.size()) break;
    }
    result_.summary.end_time = t;
    return std::move(result_);
  }

 private:
  void admit(std::size_t i) {
    const auto& ev = orders_[i];
    auto pick = net_.snap(ev.pickup);
    auto drop = net_.snap(ev.dropoff);
    if (!pick || !drop) {
      ++result_.summary.rejected;
      return;
    }
    order_state_[i].pickup = *pick;
    order_state_[i].dropoff = *drop;
    pending_.push_back(i);
  }

  void check_capacity(const VehicleState& v) {
    result_.summary.max_occupancy = std::max(result_.summary.max_occupancy, v.onboard.size());
    if (v.onboard.size() > 2) {
      throw ConsistencyError("vehicle " + v.id + " carries " + std::to_string(v.onboard.size()) + " riders");
    }
  }

  void arrive(std::size_t vi, double t) {
    auto& v = fleet_[vi];
    while (!v.route.empty() && v.route.front().cell == v.cell) {
      const auto wp = v.route.front();
      v.route.pop_front();
      if (wp.action == WaypointAction::kPickup) {
        v.onboard.push_back(wp.order);
        result_.events.push_back({t, vi, wp.order, SimEventKind::kPickup});
      } else {
        auto it = std::find(v.onboard.begin(), v.onboard.end(), wp.order);
        if (it == v.onboard.end()) throw ConsistencyError("dropoff of rider not on board");
        v.onboard.erase(it);
        result_.events.push_back({t, vi, wp.order, SimEventKind::kDropoff});
        ++result_.summary.completed;
      }
      check_capacity(v);
      v.occupancy = static_cast<Occupancy>(std::min<std::size_t>(v.onboard.size(), 2));
    }
    if (!v.route.empty() && v.path.empty()) {
      auto path = dijkstra_path(net_, v.cell, v.route.front().cell);
      v.path.assign(path.cells.begin() + 1, path.cells.end());
    }
  }

  void advance(std::size_t vi, double t) {
    auto& v = fleet_[vi];
    arrive(vi, t);
    if (v.route.empty()) {
      v.move_budget = 0.0;
      return;
    }
    v.move_budget += cfg_.vehicle_speed * cfg_.tick;
    while (v.move_budget >= 1.0 && !v.path.empty()) {
      v.cell = v.path.front();
      v.path.pop_front();
      v.move_budget -= 1.0;
      arrive(vi, t);
    }
    if (v.route.empty()) v.move_budget = 0.0;
  }

  bool matchable_one_order(const VehicleState& v) const {
    return v.onboard.size() == 1 && v.route.size() == 1 &&
           v.route.front().action == WaypointAction::kDropoff && order_state_[v.onboard[0]].willing;
  }

  void match_round(double t) {
    if (pending_.empty()) return;
    std::vector<std::size_t> empty_ids, one_ids;
    for (std::size_t i = 0; i < fleet_.size(); ++i) {
      const auto& v = fleet_[i];
      if (v.onboard.empty() && v.route.empty()) empty_ids.push_back(i);
      else if (matchable_one_order(v)) one_ids.push_back(i);
    }
    const std::size_t seats = 2 * empty_ids.size() + one_ids.size();
    if (seats == 0) {
      ++result_.summary.deferred_rounds;
      return;
    }
    const std::size_t take = std::min({pending_.size(), cfg_.max_round_orders, seats});
    std::vector<std::size_t> batch(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(take));

    SnapshotRecord rec;
    rec.round_time = t;
    rec.instance.id = "round-" + std::to_string(round_++);
    for (auto i : empty_ids) rec.instance.empty_vehicles.push_back(net_.to_point(fleet_[i].cell));
    for (auto i : one_ids) rec.instance.one_order_vehicles.push_back(net_.to_point(fleet_[i].cell));
    for (auto o : batch) rec.instance.users.push_back(net_.to_point(order_state_[o].pickup));

    const auto built = build_model(rec.instance);
    rec.solve = solve_exact(built.model, cfg_.limits);

    const Assignment* plan = nullptr;
    if (!rec.solve.incumbents.empty()) plan = &rec.solve.incumbents.back().solution;
    if (plan == nullptr) {
      ++result_.summary.deferred_rounds;
    } else {
      commit(*plan, empty_ids, one_ids, batch, t);
      pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(take));
    }
    if (on_snapshot_) on_snapshot_(rec);
    result_.snapshots.push_back(std::move(rec));
  }

  void commit(const Assignment& plan, const std::vector<std::size_t>& empty_ids,
              const std::vector<std::size_t>& one_ids, const std::vector<std::size_t>& batch, double t) {
    auto pickup = [&](std::size_t o) { return Waypoint{order_state_[o].pickup, WaypointAction::kPickup, o}; };
    auto dropoff = [&](std::size_t o) { return Waypoint{order_state_[o].dropoff, WaypointAction::kDropoff, o}; };
    auto matched = [&](std::size_t vi, std::size_t o) {
      order_state_[o].matched = true;
      ++result_.summary.matched;
      result_.events.push_back({t, vi, o, SimEventKind::kMatched});
    };

    for (const auto& [i, j] : plan.x) {
      auto& v = fleet_[empty_ids[i]];
      const auto a = batch[j];
      v.route = {pickup(a), dropoff(a)};
      v.path.clear();
      matched(empty_ids[i], a);
    }
    for (const auto& [i, j, k] : plan.y) {
      auto& v = fleet_[empty_ids[i]];
      const auto a = batch[j], b = batch[k];
      v.route = {pickup(a), pickup(b), dropoff(a), dropoff(b)};
      v.path.clear();
      matched(empty_ids[i], a);
      matched(empty_ids[i], b);
    }
    for (const auto& [i, j] : plan.z) {
      auto& v = fleet_[one_ids[i]];
      const auto rider = v.onboard.front();
      const auto b = batch[j];
      v.route = {pickup(b), dropoff(rider), dropoff(b)};
      v.path.clear();
      matched(one_ids[i], b);
    }
  }

  const RoadNetwork& net_;
  const std::vector<OrderEvent>& orders_;
  std::vector<VehicleState> fleet_;
  SimConfig cfg_;
  const std::function<void(const SnapshotRecord&)>& on_snapshot_;
  std::vector<OrderState> order_state_;
  std::vector<std::size_t> release_order_;
  std::deque<std::size_t> pending_;
  std::size_t round_ = 0;
  SimResult result_;
};

}  // namespace

SimResult run_simulation(const RoadNetwork& net, const std::vector<OrderEvent>& orders,
                         std::vector<VehicleState> fleet, const SimConfig& cfg,
                         const std::function<void(const SnapshotRecord&)>& on_snapshot) {
  return Simulation(net, orders, std::move(fleet), cfg, on_snapshot).run();
}

nlohmann::json to_json(const SnapshotRecord& rec) {
  return nlohmann::json{{"round_time", rec.round_time}, {"instance", rec.instance}, {"solve", to_json(rec.solve)}};
}

SnapshotRecord snapshot_from_json(const nlohmann::json& j) {
  SnapshotRecord rec;
  rec.round_time = j.at("round_time").get<double>();
  rec.instance = j.at("instance").get<DispatchInstance>();
  rec.solve = solve_result_from_json(j.at("solve"));
  return rec;
}

nlohmann::json to_json(const SimSummary& s) {
  return nlohmann::json{{"orders_total", s.orders_total}, {"rejected", s.rejected},
                        {"matched", s.matched},           {"completed", s.completed},
                        {"deferred_rounds", s.deferred_rounds}, {"max_occupancy", s.max_occupancy},
                        {"end_time", s.end_time}};
}

}  // namespace carpool

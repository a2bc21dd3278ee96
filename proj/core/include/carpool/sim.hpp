#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "carpool/geometry.hpp"
#include "carpool/instance.hpp"
#include "carpool/solver.hpp"

namespace carpool {

struct Cell {
  int col = 0;
  int row = 0;
  auto operator<=>(const Cell&) const = default;
};

/// 4-connected grid with unit edge weights. Cell (c, r) sits at
/// origin + (c, r) * cell_size on the projected plane.
class RoadNetwork {
 public:
  RoadNetwork(int width, int height, std::vector<Cell> blocked = {}, Point origin = {},
              double cell_size = 1.0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double cell_size() const noexcept { return cell_size_; }

  bool in_bounds(Cell c) const noexcept {
    return c.col >= 0 && c.row >= 0 && c.col < width_ && c.row < height_;
  }
  bool blocked(Cell c) const { return blocked_[index(c)]; }
  bool passable(Cell c) const { return in_bounds(c) && !blocked(c); }

  Point to_point(Cell c) const noexcept;
  /// True when `pt` lies within the grid's extent.
  bool contains(const Point& pt) const noexcept;
  Region bounds() const noexcept;
  /// Nearest unblocked cell by Manhattan distance; ties go to the
  /// lexicographically smaller (col, row). nullopt when outside the grid.
  std::optional<Cell> snap(const Point& pt) const;

  std::size_t index(Cell c) const noexcept {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.col);
  }

 private:
  int width_;
  int height_;
  Point origin_;
  double cell_size_;
  std::vector<bool> blocked_;
};

struct Path {
  std::vector<Cell> cells;  // from .. to inclusive
  std::size_t length = 0;   // edges
};

/// Shortest 4-connected path. Among equal-length paths the predecessor with
/// the smaller (col, row) wins, so results are deterministic. Throws
/// NoPathError when `to` is unreachable and ConfigError for blocked ends.
Path dijkstra_path(const RoadNetwork& net, Cell from, Cell to);

struct OrderEvent {
  std::string order_id;
  double request_time = 0.0;  // seconds
  Point pickup;
  Point dropoff;

  friend bool operator==(const OrderEvent&, const OrderEvent&) = default;
};

struct IngestOptions {
  ProjectionConfig projection;
  const RoadNetwork* network = nullptr;  // snap points inside it when set
  bool skip_malformed = false;           // otherwise the first bad row throws
};

struct IngestResult {
  std::vector<OrderEvent> events;                // ascending request_time
  std::vector<std::string> skipped;              // "line N: reason"
};

/// Reads `order_id,request_time,pickup_lat,pickup_lon,dropoff_lat,dropoff_lon`
/// with a required header row.
IngestResult ingest_orders(const std::string& path, const IngestOptions& options = {});

/// Uniform pickups/dropoffs over `region`, exponential inter-arrival times
/// with mean time_span / count. Same seed, same list.
std::vector<OrderEvent> generate_synthetic_orders(std::uint64_t seed, std::size_t count,
                                                  const Region& region, double time_span);

enum class Occupancy { kEmpty = 0, kOnePassenger = 1, kTwoPassengers = 2 };

enum class WaypointAction { kPickup, kDropoff };

struct Waypoint {
  Cell cell;
  WaypointAction action = WaypointAction::kPickup;
  std::size_t order = 0;  // index into the simulation's order list
};

struct VehicleState {
  std::string id;
  Cell cell;
  Occupancy occupancy = Occupancy::kEmpty;
  std::deque<Waypoint> route;
  std::vector<std::size_t> onboard;
  std::deque<Cell> path;  // cells still to traverse toward route.front()
  double move_budget = 0.0;
};

/// `count` vehicles on distinct random unblocked cells (repeats once the
/// grid is full).
std::vector<VehicleState> make_fleet(const RoadNetwork& net, std::size_t count, std::uint64_t seed);

struct SimConfig {
  double batch_window = 30.0;   // seconds between matching rounds
  double vehicle_speed = 1.0;   // grid units per second
  double tick = 1.0;            // seconds
  double horizon = 86'400.0;    // hard stop
  std::size_t max_round_orders = 8;
  double share_willingness = 0.5;  // fraction of riders open to a z pickup
  std::uint64_t seed = 0;
  SolveLimits limits{};
};

struct SnapshotRecord {
  double round_time = 0.0;
  DispatchInstance instance;
  SolveResult solve;
};

enum class SimEventKind { kMatched, kPickup, kDropoff };

struct SimEvent {
  double time = 0.0;
  std::size_t vehicle = 0;
  std::size_t order = 0;
  SimEventKind kind = SimEventKind::kMatched;
};

struct SimSummary {
  std::size_t orders_total = 0;
  std::size_t rejected = 0;
  std::size_t matched = 0;
  std::size_t completed = 0;
  std::size_t deferred_rounds = 0;
  std::size_t max_occupancy = 0;
  double end_time = 0.0;
};

struct SimResult {
  std::vector<SnapshotRecord> snapshots;
  std::vector<SimEvent> events;
  SimSummary summary;
};

/// Batched dispatch loop. Every batch_window seconds the oldest pending
/// orders (at most max_round_orders and at most the free seat count) and
/// the matchable vehicles form a DispatchInstance, which is solved exactly
/// and committed to vehicle routes:
///   x: pick A, drop A
///   y: pick A, pick B, drop A, drop B
///   z: pick B, drop A, drop B
/// Matchable vehicles are idle empty ones, plus one-passenger vehicles with
/// no pending pickup whose rider is willing to share. Throws
/// ConsistencyError if any vehicle ever carries more than two riders.
SimResult run_simulation(const RoadNetwork& net, const std::vector<OrderEvent>& orders,
                         std::vector<VehicleState> fleet, const SimConfig& cfg,
                         const std::function<void(const SnapshotRecord&)>& on_snapshot = {});

nlohmann::json to_json(const SnapshotRecord& rec);
SnapshotRecord snapshot_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimSummary& summary);

}  // namespace carpool

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "carpool/geometry.hpp"

namespace carpool {

/// One matching round: m empty vehicles, n one-order vehicles, p users.
/// Entities are referenced by their position in each list.
struct DispatchInstance {
  std::string id;
  std::vector<Point> empty_vehicles;
  std::vector<Point> one_order_vehicles;
  std::vector<Point> users;

  std::size_t m() const noexcept { return empty_vehicles.size(); }
  std::size_t n() const noexcept { return one_order_vehicles.size(); }
  std::size_t p() const noexcept { return users.size(); }
  std::size_t scale() const noexcept { return m() + n() + p(); }

  friend bool operator==(const DispatchInstance&, const DispatchInstance&) = default;
};

/// Axis-aligned sampling box on the projected plane.
struct Region {
  double min_x = 80.0;
  double min_y = 25.0;
  double max_x = 105.0;
  double max_y = 50.0;

  bool contains(const Point& pt) const noexcept {
    return pt.x >= min_x && pt.x <= max_x && pt.y >= min_y && pt.y <= max_y;
  }
};

/// Uniformly samples every entity inside `region`. Deterministic per seed.
DispatchInstance random_instance(std::string id, std::size_t m, std::size_t n, std::size_t p,
                                 std::uint64_t seed, const Region& region = {});

/// The 3/3/3 worked example used throughout the tests and docs.
DispatchInstance exemplar_instance();

// {"id": str, "empty": [[x,y],...], "one_order": [[x,y],...], "users": [[x,y],...]}
void to_json(nlohmann::json& j, const DispatchInstance& inst);
void from_json(const nlohmann::json& j, DispatchInstance& inst);

/// Reads a single-instance JSON document or a JSONL file of instances.
std::vector<DispatchInstance> load_instances(const std::string& path);

}  // namespace carpool

#include "carpool/instance.hpp"

#include <fstream>
#include <sstream>

#include "carpool/errors.hpp"
#include "carpool/random.hpp"

namespace carpool {
namespace {

std::vector<Point> sample_points(Rng& rng, std::size_t count, const Region& region) {
  std::vector<Point> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = rng.uniform(region.min_x, region.max_x);
    const double y = rng.uniform(region.min_y, region.max_y);
    pts.push_back({x, y});
  }
  return pts;
}

nlohmann::json points_to_json(const std::vector<Point>& pts) {
  auto arr = nlohmann::json::array();
  for (const auto& pt : pts) arr.push_back({pt.x, pt.y});
  return arr;
}

std::vector<Point> points_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("instance missing \"") + key + "\"");
  std::vector<Point> pts;
  for (const auto& item : j.at(key)) {
    if (!item.is_array() || item.size() != 2) {
      throw ParseError(std::string("\"") + key + "\" entries must be [x, y] pairs");
    }
    Point pt{item[0].get<double>(), item[1].get<double>()};
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y)) {
      throw ParseError(std::string("non-finite coordinate in \"") + key + "\"");
    }
    pts.push_back(pt);
  }
  return pts;
}

}  // namespace

DispatchInstance random_instance(std::string id, std::size_t m, std::size_t n, std::size_t p,
                                 std::uint64_t seed, const Region& region) {
  Rng rng(seed);
  DispatchInstance inst;
  inst.id = std::move(id);
  inst.empty_vehicles = sample_points(rng, m, region);
  inst.one_order_vehicles = sample_points(rng, n, region);
  inst.users = sample_points(rng, p, region);
  return inst;
}

DispatchInstance exemplar_instance() {
  return DispatchInstance{
      "exemplar",
      {{86.97, 35.86}, {85.23, 36.74}, {95.62, 28.43}},
      {{90.55, 35.17}, {101.43, 44.49}, {100.56, 44.77}},
      {{90.33, 35.82}, {97.04, 41.87}, {100.91, 42.75}},
  };
}

void to_json(nlohmann::json& j, const DispatchInstance& inst) {
  j = nlohmann::json{{"id", inst.id},
                     {"empty", points_to_json(inst.empty_vehicles)},
                     {"one_order", points_to_json(inst.one_order_vehicles)},
                     {"users", points_to_json(inst.users)}};
}

void from_json(const nlohmann::json& j, DispatchInstance& inst) {
  if (!j.is_object()) throw ParseError("instance must be a JSON object");
  inst.id = j.value("id", std::string{});
  inst.empty_vehicles = points_from_json(j, "empty");
  inst.one_order_vehicles = points_from_json(j, "one_order");
  inst.users = points_from_json(j, "users");
}

std::vector<DispatchInstance> load_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<DispatchInstance> out;
  // A whole-file parse succeeds for a single document; otherwise treat as JSONL.
  try {
    auto doc = nlohmann::json::parse(text);
    if (doc.is_array()) {
      for (const auto& item : doc) out.push_back(item.get<DispatchInstance>());
    } else {
      out.push_back(doc.get<DispatchInstance>());
    }
    return out;
  } catch (const nlohmann::json::parse_error&) {
  }
  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<DispatchInstance>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ": " + e.what(), lineno);
    }
  }
  return out;
}

}  // namespace carpool

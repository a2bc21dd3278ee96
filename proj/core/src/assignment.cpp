#include "carpool/assignment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <sstream>

#include "carpool/errors.hpp"

namespace carpool {
namespace {

void check_bounds(std::size_t idx, std::size_t size, const char* what) {
  if (idx >= size) {
    throw InvalidSolutionError(std::string(what) + " index " + std::to_string(idx) +
                               " out of range (size " + std::to_string(size) + ")");
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool consume_prefix(std::string_view& s, std::string_view prefix) {
  if (s.substr(0, prefix.size()) == prefix) {
    s.remove_prefix(prefix.size());
    return true;
  }
  return false;
}

enum class Role { kEmpty, kOneOrder, kUser };

std::size_t parse_index(std::string_view token, Role role) {
  std::string_view digits = trim(token);
  switch (role) {
    case Role::kEmpty:
      consume_prefix(digits, "EMPTY_");
      break;
    case Role::kOneOrder:
      consume_prefix(digits, "ONE_REQUEST_");
      break;
    case Role::kUser:
      consume_prefix(digits, "USER_");
      break;
  }
  std::size_t value = 0;
  const auto* first = digits.data();
  const auto* last = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (digits.empty() || ec != std::errc{} || ptr != last) {
    throw ParseError("invalid index token '" + std::string(trim(token)) + "'");
  }
  return value;
}

template <typename Set>
std::string format_set(const Set& set, auto&& fields) {
  std::string out;
  for (const auto& item : set) {
    if (!out.empty()) out += ' ';
    out += '(';
    const auto vals = fields(item);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (i) out += ", ";
      out += std::to_string(vals[i]);
    }
    out += ')';
  }
  return out;
}

}  // namespace

double evaluate_objective(const DispatchInstance& inst, const Assignment& sol) {
  double total = 0.0;
  for (const auto& [i, j] : sol.x) {
    check_bounds(i, inst.m(), "empty vehicle");
    check_bounds(j, inst.p(), "user");
    total += manhattan(inst.empty_vehicles[i], inst.users[j]);
  }
  for (const auto& [i, j, k] : sol.y) {
    check_bounds(i, inst.m(), "empty vehicle");
    check_bounds(j, inst.p(), "user");
    check_bounds(k, inst.p(), "user");
    total += manhattan(inst.empty_vehicles[i], inst.users[j]) + manhattan(inst.users[j], inst.users[k]);
  }
  for (const auto& [i, j] : sol.z) {
    check_bounds(i, inst.n(), "one-order vehicle");
    check_bounds(j, inst.p(), "user");
    total += manhattan(inst.one_order_vehicles[i], inst.users[j]);
  }
  return total;
}

std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kCoverage:
      return "coverage";
    case ConstraintKind::kEmptyCapacity:
      return "empty_capacity";
    case ConstraintKind::kSharedCapacity:
      return "shared_capacity";
    case ConstraintKind::kIndexBounds:
      return "index_bounds";
    case ConstraintKind::kDistinctUsers:
      return "distinct_users";
  }
  return "unknown";
}

bool ValidationReport::has(ConstraintKind kind) const noexcept {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

ValidationReport validate(const DispatchInstance& inst, const Assignment& sol) {
  ValidationReport report;
  auto add = [&report](ConstraintKind kind, std::size_t idx, std::string detail) {
    report.violations.push_back({kind, idx, std::move(detail)});
  };

  std::vector<int> covered(inst.p(), 0);
  std::vector<int> empty_load(inst.m(), 0);
  std::vector<int> shared_load(inst.n(), 0);

  auto cover = [&](std::size_t user, const char* where) {
    if (user >= inst.p()) {
      add(ConstraintKind::kIndexBounds, user,
          std::string("user index out of range in ") + where + " (p=" + std::to_string(inst.p()) + ")");
      return false;
    }
    ++covered[user];
    return true;
  };
  auto vehicle_ok = [&](std::size_t v, std::size_t size, const char* where) {
    if (v >= size) {
      add(ConstraintKind::kIndexBounds, v,
          std::string("vehicle index out of range in ") + where + " (size " + std::to_string(size) + ")");
      return false;
    }
    return true;
  };

  for (const auto& [i, j] : sol.x) {
    if (vehicle_ok(i, inst.m(), "x")) ++empty_load[i];
    cover(j, "x");
  }
  for (const auto& [i, j, k] : sol.y) {
    if (vehicle_ok(i, inst.m(), "y")) ++empty_load[i];
    if (j == k) {
      add(ConstraintKind::kDistinctUsers, j, "y triple picks up user " + std::to_string(j) + " twice");
    }
    cover(j, "y");
    cover(k, "y");
  }
  for (const auto& [i, j] : sol.z) {
    if (vehicle_ok(i, inst.n(), "z")) ++shared_load[i];
    cover(j, "z");
  }

  for (std::size_t j = 0; j < inst.p(); ++j) {
    if (covered[j] != 1) {
      add(ConstraintKind::kCoverage, j,
          "user " + std::to_string(j) + " covered " + std::to_string(covered[j]) + " times");
    }
  }
  for (std::size_t i = 0; i < inst.m(); ++i) {
    if (empty_load[i] > 1) {
      add(ConstraintKind::kEmptyCapacity, i,
          "empty vehicle " + std::to_string(i) + " used by " + std::to_string(empty_load[i]) + " x/y entries");
    }
  }
  for (std::size_t i = 0; i < inst.n(); ++i) {
    if (shared_load[i] > 1) {
      add(ConstraintKind::kSharedCapacity, i,
          "one-order vehicle " + std::to_string(i) + " used by " + std::to_string(shared_load[i]) + " z entries");
    }
  }
  return report;
}

std::string format_x(const Assignment& sol) {
  return format_set(sol.x, [](const XPair& e) { return std::array{e.vehicle, e.user}; });
}

std::string format_y(const Assignment& sol) {
  return format_set(sol.y, [](const YTriple& e) { return std::array{e.vehicle, e.first, e.second}; });
}

std::string format_z(const Assignment& sol) {
  return format_set(sol.z, [](const ZPair& e) { return std::array{e.vehicle, e.user}; });
}

std::string format_solution_lines(const Assignment& sol) {
  std::string out;
  out += sol.x.empty() ? "" : "x: " + format_x(sol);
  out += '\n';
  out += sol.y.empty() ? "" : "y: " + format_y(sol);
  out += '\n';
  out += sol.z.empty() ? "" : "z: " + format_z(sol);
  out += '\n';
  return out;
}

void parse_tuple_list(std::string_view body, LineKind kind, Assignment& into) {
  if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
  body = trim(body);

  const std::size_t arity = kind == LineKind::kY ? 3 : 2;
  const Role vehicle_role = kind == LineKind::kZ ? Role::kOneOrder : Role::kEmpty;

  while (!body.empty()) {
    if (body.front() == ',' || std::isspace(static_cast<unsigned char>(body.front()))) {
      body.remove_prefix(1);
      continue;
    }
    if (body.front() != '(') {
      const auto end = body.find_first_of(" \t(");
      throw ParseError("unexpected token '" + std::string(body.substr(0, end)) + "'");
    }
    const auto close = body.find(')');
    if (close == std::string_view::npos) {
      throw ParseError("unterminated tuple '" + std::string(body) + "'");
    }
    std::string_view inner = body.substr(1, close - 1);
    body.remove_prefix(close + 1);

    std::vector<std::string_view> parts;
    while (true) {
      const auto comma = inner.find(',');
      parts.push_back(inner.substr(0, comma));
      if (comma == std::string_view::npos) break;
      inner.remove_prefix(comma + 1);
    }
    if (parts.size() != arity) {
      throw ParseError("expected " + std::to_string(arity) + " indices in tuple, got " +
                       std::to_string(parts.size()));
    }
    const std::size_t v = parse_index(parts[0], vehicle_role);
    const std::size_t u = parse_index(parts[1], Role::kUser);
    bool inserted = false;
    switch (kind) {
      case LineKind::kX:
        inserted = into.x.insert({v, u}).second;
        break;
      case LineKind::kY:
        inserted = into.y.insert({v, u, parse_index(parts[2], Role::kUser)}).second;
        break;
      case LineKind::kZ:
        inserted = into.z.insert({v, u}).second;
        break;
    }
    if (!inserted) throw ParseError("duplicate tuple for vehicle " + std::to_string(v));
  }
}

void to_json(nlohmann::json& j, const Assignment& sol) {
  j = nlohmann::json{{"x", format_x(sol)}, {"y", format_y(sol)}, {"z", format_z(sol)}};
}

void from_json(const nlohmann::json& j, Assignment& sol) {
  sol = Assignment{};
  parse_tuple_list(j.value("x", std::string{}), LineKind::kX, sol);
  parse_tuple_list(j.value("y", std::string{}), LineKind::kY, sol);
  parse_tuple_list(j.value("z", std::string{}), LineKind::kZ, sol);
}

}  // namespace carpool

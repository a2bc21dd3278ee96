#pragma once

#include <compare>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "carpool/instance.hpp"

namespace carpool {

/// Empty vehicle `vehicle` serves `user` alone.
struct XPair {
  std::size_t vehicle = 0;
  std::size_t user = 0;
  auto operator<=>(const XPair&) const = default;
};

/// Empty vehicle `vehicle` picks up `first` then `second`. Order matters.
struct YTriple {
  std::size_t vehicle = 0;
  std::size_t first = 0;
  std::size_t second = 0;
  auto operator<=>(const YTriple&) const = default;
};

/// One-order vehicle `vehicle` adds `user`.
struct ZPair {
  std::size_t vehicle = 0;
  std::size_t user = 0;
  auto operator<=>(const ZPair&) const = default;
};

/// A candidate solution. Its objective is always recomputed from an
/// instance via evaluate_objective, never carried alongside.
struct Assignment {
  std::set<XPair> x;
  std::set<YTriple> y;
  std::set<ZPair> z;

  bool empty() const noexcept { return x.empty() && y.empty() && z.empty(); }
  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

/// Total pickup distance. Throws InvalidSolutionError on out-of-range indices.
double evaluate_objective(const DispatchInstance& inst, const Assignment& sol);

enum class ConstraintKind { kCoverage, kEmptyCapacity, kSharedCapacity, kIndexBounds, kDistinctUsers };

std::string_view to_string(ConstraintKind kind);

struct Violation {
  ConstraintKind kind;
  std::size_t index;  // user, vehicle, or offending index depending on kind
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool feasible() const noexcept { return violations.empty(); }
  bool has(ConstraintKind kind) const noexcept;
};

/// Checks coverage, both capacity families, index bounds and j != k. Never throws.
ValidationReport validate(const DispatchInstance& inst, const Assignment& sol);

/// Objective tolerance used for every optimality comparison.
inline constexpr double kObjectiveTolerance = 1e-9;

// Line syntax shared by prompts and JSON artifacts:
//   "(0, 1) (1, 0)" for pairs, "(0, 1, 2)" for triples.
std::string format_x(const Assignment& sol);
std::string format_y(const Assignment& sol);
std::string format_z(const Assignment& sol);

/// Three lines "x: ...", "y: ...", "z: ..."; an empty set renders as an
/// empty line. Each line is newline-terminated.
std::string format_solution_lines(const Assignment& sol);

enum class LineKind { kX, kY, kZ };

/// Parses the tuple list after "x:", "y:" or "z:". Accepts EMPTY_/USER_/
/// ONE_REQUEST_ prefixes in their matching slots, commas between tuples, and
/// a trailing "# comment". Throws ParseError naming the offending token.
/// Duplicate tuples are rejected.
void parse_tuple_list(std::string_view body, LineKind kind, Assignment& into);

void to_json(nlohmann::json& j, const Assignment& sol);
void from_json(const nlohmann::json& j, Assignment& sol);

}  // namespace carpool

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "carpool/assignment.hpp"
#include "carpool/instance.hpp"

namespace carpool {

enum class VarKind { kX, kY, kZ };

/// Column identity. `k` is set only for Y variables and differs from `j`.
struct VarIndex {
  VarKind kind = VarKind::kX;
  std::size_t i = 0;
  std::size_t j = 0;
  std::optional<std::size_t> k;

  static VarIndex x(std::size_t i, std::size_t j) { return {VarKind::kX, i, j, std::nullopt}; }
  static VarIndex y(std::size_t i, std::size_t j, std::size_t k) { return {VarKind::kY, i, j, k}; }
  static VarIndex z(std::size_t i, std::size_t j) { return {VarKind::kZ, i, j, std::nullopt}; }

  /// LP-file name: x_i_j, y_i_j_k, z_i_j.
  std::string name() const;

  friend bool operator==(const VarIndex&, const VarIndex&) = default;
};

enum class RowKind { kCoverage, kEmptyCapacity, kSharedCapacity };

/// A constraint row. Every coefficient is 1, so only the column support is
/// stored; coverage rows are equalities, capacity rows are <=. RHS is 1.
struct ConstraintRow {
  RowKind kind = RowKind::kCoverage;
  std::size_t owner = 0;  // user index for coverage, vehicle index otherwise
  std::vector<std::size_t> cols;
};

/// The carpool MIP in minimisation form.
///
/// Columns: every X(i,j) in (i,j) order, then every Y(i,j,k) with k != j in
/// (i,j,k) order, then every Z(i,j). Rows: one coverage row per user, then
/// one capacity row per empty vehicle, then one per one-order vehicle.
struct MipModel {
  std::string instance_id;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<VarIndex> variables;
  std::vector<double> objective;
  std::vector<ConstraintRow> rows;

  std::size_t num_cols() const noexcept { return variables.size(); }
  std::size_t num_rows() const noexcept { return rows.size(); }
  std::size_t nonzeros() const noexcept;

  /// Converts a 0/1 column support into an Assignment.
  Assignment to_assignment(std::span<const std::size_t> support) const;
};

struct BuildReport {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t nonzeros = 0;
  std::chrono::nanoseconds build_time{0};
};

struct BuiltModel {
  MipModel model;
  BuildReport report;
};

BuiltModel build_model(const DispatchInstance& inst);

/// Constraint-matrix dimensions. `nominal_cols` counts the full j x k grid of
/// Y variables (m*p^2); `cols` counts only k != j, which is what build_model
/// creates.
struct MatrixShape {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t nominal_cols = 0;
};

MatrixShape matrix_shape(std::size_t m, std::size_t n, std::size_t p);

/// Median build time over `trials` random instances with m = n = p = s for
/// each s. `set_sizes` must be sorted ascending.
std::vector<BuildReport> measure_build_growth(std::span<const std::size_t> set_sizes,
                                              std::size_t trials, std::uint64_t seed = 0);

/// Header `s,rows,cols,nonzeros,build_ns`, one row per report.
void write_growth_csv(std::ostream& out, std::span<const BuildReport> reports);

/// CPLEX-LP style export; grammar in docs/lp_format.md.
void write_lp(std::ostream& out, const MipModel& model);

}  // namespace carpool

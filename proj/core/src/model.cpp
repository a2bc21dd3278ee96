#include "carpool/model.hpp"

#include <algorithm>
#include <cstdio>

#include "carpool/errors.hpp"

namespace carpool {

std::string VarIndex::name() const {
  switch (kind) {
    case VarKind::kX:
      return "x_" + std::to_string(i) + "_" + std::to_string(j);
    case VarKind::kY:
      return "y_" + std::to_string(i) + "_" + std::to_string(j) + "_" + std::to_string(*k);
    case VarKind::kZ:
      return "z_" + std::to_string(i) + "_" + std::to_string(j);
  }
  return {};
}

std::size_t MipModel::nonzeros() const noexcept {
  std::size_t total = 0;
  for (const auto& row : rows) total += row.cols.size();
  return total;
}

Assignment MipModel::to_assignment(std::span<const std::size_t> support) const {
  Assignment sol;
  for (std::size_t col : support) {
    if (col >= variables.size()) {
      throw InvalidSolutionError("column " + std::to_string(col) + " out of range");
    }
    const auto& v = variables[col];
    switch (v.kind) {
      case VarKind::kX:
        sol.x.insert({v.i, v.j});
        break;
      case VarKind::kY:
        sol.y.insert({v.i, v.j, *v.k});
        break;
      case VarKind::kZ:
        sol.z.insert({v.i, v.j});
        break;
    }
  }
  return sol;
}

BuiltModel build_model(const DispatchInstance& inst) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t m = inst.m(), n = inst.n(), p = inst.p();

  BuiltModel out;
  MipModel& model = out.model;
  model.instance_id = inst.id;
  model.m = m;
  model.n = n;
  model.p = p;

  const auto shape = matrix_shape(m, n, p);
  model.variables.reserve(shape.cols);
  model.objective.reserve(shape.cols);

  model.rows.resize(p + m + n);
  for (std::size_t j = 0; j < p; ++j) model.rows[j] = {RowKind::kCoverage, j, {}};
  for (std::size_t i = 0; i < m; ++i) model.rows[p + i] = {RowKind::kEmptyCapacity, i, {}};
  for (std::size_t i = 0; i < n; ++i) model.rows[p + m + i] = {RowKind::kSharedCapacity, i, {}};

  auto add_col = [&](VarIndex var, double cost) {
    const std::size_t col = model.variables.size();
    model.variables.push_back(var);
    model.objective.push_back(cost);
    return col;
  };

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const auto col = add_col(VarIndex::x(i, j), manhattan(inst.empty_vehicles[i], inst.users[j]));
      model.rows[j].cols.push_back(col);
      model.rows[p + i].cols.push_back(col);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double to_first = manhattan(inst.empty_vehicles[i], inst.users[j]);
      for (std::size_t k = 0; k < p; ++k) {
        if (k == j) continue;
        const auto col = add_col(VarIndex::y(i, j, k), to_first + manhattan(inst.users[j], inst.users[k]));
        model.rows[j].cols.push_back(col);
        model.rows[k].cols.push_back(col);
        model.rows[p + i].cols.push_back(col);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const auto col = add_col(VarIndex::z(i, j), manhattan(inst.one_order_vehicles[i], inst.users[j]));
      model.rows[j].cols.push_back(col);
      model.rows[p + m + i].cols.push_back(col);
    }
  }
  // Y columns were appended to coverage rows out of column order.
  for (std::size_t j = 0; j < p; ++j) std::sort(model.rows[j].cols.begin(), model.rows[j].cols.end());

  out.report = BuildReport{m, n, p, model.num_rows(), model.num_cols(), model.nonzeros(),
                           std::chrono::steady_clock::now() - start};
  return out;
}

MatrixShape matrix_shape(std::size_t m, std::size_t n, std::size_t p) {
  const std::size_t y_cols = p == 0 ? 0 : m * p * (p - 1);
  return MatrixShape{m + n + p, m * p + y_cols + n * p, m * p + m * p * p + n * p};
}

std::vector<BuildReport> measure_build_growth(std::span<const std::size_t> set_sizes,
                                              std::size_t trials, std::uint64_t seed) {
  if (!std::is_sorted(set_sizes.begin(), set_sizes.end())) {
    throw ConfigError("set sizes must be sorted ascending");
  }
  trials = std::max<std::size_t>(trials, 1);
  std::vector<BuildReport> reports;
  for (std::size_t s : set_sizes) {
    std::vector<std::chrono::nanoseconds> times;
    BuildReport last;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto inst = random_instance("growth-" + std::to_string(s), s, s, s, seed + t);
      last = build_model(inst).report;
      times.push_back(last.build_time);
    }
    std::nth_element(times.begin(), times.begin() + times.size() / 2, times.end());
    last.build_time = times[times.size() / 2];
    reports.push_back(last);
  }
  return reports;
}

void write_growth_csv(std::ostream& out, std::span<const BuildReport> reports) {
  out << "s,rows,cols,nonzeros,build_ns\n";
  for (const auto& r : reports) {
    out << r.m << ',' << r.rows << ',' << r.cols << ',' << r.nonzeros << ',' << r.build_time.count()
        << '\n';
  }
}

void write_lp(std::ostream& out, const MipModel& model) {
  char buf[64];
  out << "\\ carpool dispatch model " << model.instance_id << " (m=" << model.m << " n=" << model.n
      << " p=" << model.p << ")\n";
  out << "Minimize\n obj:";
  if (model.variables.empty()) out << " 0";
  for (std::size_t c = 0; c < model.variables.size(); ++c) {
    std::snprintf(buf, sizeof buf, "%.17g", model.objective[c]);
    out << (c ? " + " : " ") << buf << ' ' << model.variables[c].name();
  }
  out << "\nSubject To\n";
  for (const auto& row : model.rows) {
    const char* prefix = row.kind == RowKind::kCoverage        ? "cover_"
                         : row.kind == RowKind::kEmptyCapacity ? "empty_"
                                                               : "share_";
    out << ' ' << prefix << row.owner << ':';
    if (row.cols.empty()) out << " 0";
    for (std::size_t t = 0; t < row.cols.size(); ++t) {
      out << (t ? " + " : " ") << model.variables[row.cols[t]].name();
    }
    out << (row.kind == RowKind::kCoverage ? " = 1\n" : " <= 1\n");
  }
  out << "Binary\n";
  for (const auto& v : model.variables) out << ' ' << v.name() << '\n';
  out << "End\n";
}

}  // namespace carpool

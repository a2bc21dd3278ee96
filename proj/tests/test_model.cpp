#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "carpool/errors.hpp"
#include "carpool/model.hpp"
#include "oracles.hpp"

namespace carpool {
namespace {

TEST(BuildModel, ThreeByThreeByThreeShape) {
  const auto built = build_model(random_instance("s", 3, 3, 3, 1));
  EXPECT_EQ(built.model.num_rows(), 9u);
  EXPECT_EQ(built.model.num_cols(), 36u);
  EXPECT_EQ(built.report.rows, 9u);
  EXPECT_EQ(built.report.cols, 36u);
}

TEST(BuildModel, SmallestNonemptyCase) {
  const auto model = build_model(random_instance("tiny", 1, 0, 1, 1)).model;
  ASSERT_EQ(model.num_cols(), 1u);
  EXPECT_EQ(model.variables[0], VarIndex::x(0, 0));
  ASSERT_EQ(model.num_rows(), 2u);
  EXPECT_EQ(model.rows[0].kind, RowKind::kCoverage);
  EXPECT_EQ(model.rows[1].kind, RowKind::kEmptyCapacity);
}

TEST(BuildModel, ExemplarCoefficient) {
  const auto model = build_model(exemplar_instance()).model;
  const auto it = std::find(model.variables.begin(), model.variables.end(), VarIndex::x(0, 1));
  ASSERT_NE(it, model.variables.end());
  EXPECT_NEAR(model.objective[static_cast<std::size_t>(it - model.variables.begin())], 16.08, 1e-9);
}

TEST(BuildModel, CoefficientsMatchDistanceExpressions) {
  const auto inst = random_instance("coef", 2, 2, 3, 4);
  const auto model = build_model(inst).model;
  for (std::size_t c = 0; c < model.num_cols(); ++c) {
    const auto& v = model.variables[c];
    double expected = 0;
    switch (v.kind) {
      case VarKind::kX:
        expected = manhattan(inst.empty_vehicles[v.i], inst.users[v.j]);
        break;
      case VarKind::kY:
        ASSERT_TRUE(v.k && *v.k != v.j);
        expected = manhattan(inst.empty_vehicles[v.i], inst.users[v.j]) + manhattan(inst.users[v.j], inst.users[*v.k]);
        break;
      case VarKind::kZ:
        expected = manhattan(inst.one_order_vehicles[v.i], inst.users[v.j]);
        break;
    }
    EXPECT_EQ(model.objective[c], expected) << v.name();
  }
}

TEST(BuildModel, ShapeMatchesFormulaExhaustively) {
  for (std::size_t m = 0; m <= 6; ++m) {
    for (std::size_t n = 0; n <= 6; ++n) {
      for (std::size_t p = 0; p <= 6; ++p) {
        const auto model = build_model(random_instance("e", m, n, p, m * 49 + n * 7 + p)).model;
        ASSERT_EQ(model.num_rows(), m + n + p);
        ASSERT_EQ(model.num_cols(), m * p + m * p * (p > 0 ? p - 1 : 0) + n * p);
        const auto shape = matrix_shape(m, n, p);
        ASSERT_EQ(shape.cols, model.num_cols());
        ASSERT_EQ(shape.nominal_cols, m * p + m * p * p + n * p);
      }
    }
  }
}

TEST(BuildModel, CoverageRowNonzerosMatchTripleLoop) {
  for (std::size_t m = 0; m <= 4; ++m) {
    for (std::size_t n = 0; n <= 3; ++n) {
      for (std::size_t p = 2; p <= 5; ++p) {
        const auto model = build_model(random_instance("nz", m, n, p, 3)).model;
        for (std::size_t j = 0; j < p; ++j) {
          std::size_t literal = 0;
          for (std::size_t i = 0; i < m; ++i) {
            ++literal;  // x_ij
            for (std::size_t a = 0; a < p; ++a) {
              for (std::size_t b = 0; b < p; ++b) {
                if (a != b && (a == j || b == j)) ++literal;
              }
            }
          }
          literal += n;
          EXPECT_EQ(model.rows[j].cols.size(), literal);
          EXPECT_EQ(literal, m + 2 * m * (p - 1) + n);
        }
      }
    }
  }
}

TEST(BuildModel, NonzeroCountPerColumnType) {
  const auto model = build_model(random_instance("nz", 3, 2, 4, 1)).model;
  // x and z columns hit a coverage row and a capacity row; y columns hit two coverage rows and one capacity row.
  const auto s = matrix_shape(3, 2, 4);
  const std::size_t y = 3 * 4 * 3;
  EXPECT_EQ(model.nonzeros(), 2 * (s.cols - y) + 3 * y);
}

TEST(BuildModel, SupportObjectiveEqualsEvaluateObjective) {
  Rng rng(77);
  for (int t = 0; t < 300; ++t) {
    const auto inst = random_instance("sup", 1 + rng.below(3), rng.below(3), 1 + rng.below(4), rng.next());
    const auto sol = testing::random_feasible_assignment(inst, rng);
    if (!sol) continue;
    const auto model = build_model(inst).model;
    std::vector<std::size_t> support;
    for (std::size_t c = 0; c < model.num_cols(); ++c) {
      const auto& v = model.variables[c];
      const bool on = v.kind == VarKind::kX   ? sol->x.contains({v.i, v.j})
                      : v.kind == VarKind::kY ? sol->y.contains({v.i, v.j, *v.k})
                                              : sol->z.contains({v.i, v.j});
      if (on) support.push_back(c);
    }
    double total = 0;
    for (auto c : support) total += model.objective[c];
    EXPECT_EQ(total, evaluate_objective(inst, *sol));
    EXPECT_EQ(model.to_assignment(support), *sol);
  }
}

TEST(MatrixShape, Examples) {
  const auto a = matrix_shape(3, 3, 3);
  EXPECT_EQ(a.rows, 9u);
  EXPECT_EQ(a.cols, 36u);
  EXPECT_EQ(a.nominal_cols, 45u);
  const auto b = matrix_shape(0, 0, 0);
  EXPECT_EQ(b.rows, 0u);
  EXPECT_EQ(b.cols, 0u);
  const auto c = matrix_shape(2, 1, 4);
  EXPECT_EQ(c.rows, 7u);
  EXPECT_EQ(c.cols, 36u);
}

TEST(BuildGrowth, ColumnCountsFollowShapeFormula) {
  const std::vector<std::size_t> sizes{5, 10, 20};
  const auto reports = measure_build_growth(sizes, 1);
  ASSERT_EQ(reports.size(), 3u);
  EXPECT_EQ(reports[0].cols, 150u);
  EXPECT_EQ(reports[1].cols, 1100u);
  EXPECT_EQ(reports[2].cols, 8400u);
  EXPECT_EQ(reports[2].rows, 60u);
}

TEST(BuildGrowth, EmptyAndUnsorted) {
  EXPECT_TRUE(measure_build_growth({}, 5).empty());
  const std::vector<std::size_t> unsorted{10, 5};
  EXPECT_THROW(measure_build_growth(unsorted, 1), ConfigError);
}

TEST(BuildGrowth, MedianTimeNondecreasing) {
  const std::vector<std::size_t> sizes{10, 20, 40};
  const auto reports = measure_build_growth(sizes, 7);
  EXPECT_LE(reports[0].build_time, reports[1].build_time);
  EXPECT_LE(reports[1].build_time, reports[2].build_time);
}

TEST(BuildGrowth, CsvSchema) {
  const std::vector<std::size_t> sizes{2};
  const auto reports = measure_build_growth(sizes, 1);
  std::ostringstream out;
  write_growth_csv(out, reports);
  EXPECT_EQ(out.str().rfind("s,rows,cols,nonzeros,build_ns\n2,6,12,", 0), 0u) << out.str();
}

TEST(WriteLp, SmallModel) {
  DispatchInstance inst;
  inst.id = "lp";
  inst.empty_vehicles = {{0, 0}};
  inst.one_order_vehicles = {{0, 3}};
  inst.users = {{1, 0}, {2, 0}};
  std::ostringstream out;
  write_lp(out, build_model(inst).model);
  EXPECT_EQ(out.str(),
            "\\ carpool dispatch model lp (m=1 n=1 p=2)\n"
            "Minimize\n"
            " obj: 1 x_0_0 + 2 x_0_1 + 2 y_0_0_1 + 3 y_0_1_0 + 4 z_0_0 + 5 z_0_1\n"
            "Subject To\n"
            " cover_0: x_0_0 + y_0_0_1 + y_0_1_0 + z_0_0 = 1\n"
            " cover_1: x_0_1 + y_0_0_1 + y_0_1_0 + z_0_1 = 1\n"
            " empty_0: x_0_0 + x_0_1 + y_0_0_1 + y_0_1_0 <= 1\n"
            " share_0: z_0_0 + z_0_1 <= 1\n"
            "Binary\n x_0_0\n x_0_1\n y_0_0_1\n y_0_1_0\n z_0_0\n z_0_1\n"
            "End\n");
}

}  // namespace
}  // namespace carpool

#pragma once

// Independent reference implementations used only by tests.

#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "carpool/assignment.hpp"
#include "carpool/instance.hpp"
#include "carpool/random.hpp"
#include "carpool/sim.hpp"

namespace carpool::testing {

/// Literal transcription of the four constraint families as sums over
/// dense 0/1 arrays x[i][j], y[i][j][k] (k != j), z[i][j]. Assumes every
/// index is in range and k != j in every triple.
inline bool literal_constraints_hold(const DispatchInstance& inst, const Assignment& sol) {
  const std::size_t m = inst.m(), n = inst.n(), p = inst.p();
  std::vector<std::vector<int>> x(m, std::vector<int>(p, 0));
  std::vector<std::vector<std::vector<int>>> y(m, std::vector<std::vector<int>>(p, std::vector<int>(p, 0)));
  std::vector<std::vector<int>> z(n, std::vector<int>(p, 0));
  for (const auto& e : sol.x) x[e.vehicle][e.user] = 1;
  for (const auto& e : sol.y) y[e.vehicle][e.first][e.second] = 1;
  for (const auto& e : sol.z) z[e.vehicle][e.user] = 1;

  for (std::size_t j = 0; j < p; ++j) {
    int lhs = 0;
    for (std::size_t i = 0; i < m; ++i) lhs += x[i][j];
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < p; ++k) {
        if (k != j) lhs += y[i][j][k] + y[i][k][j];
      }
    }
    for (std::size_t i = 0; i < n; ++i) lhs += z[i][j];
    if (lhs != 1) return false;
  }
  for (std::size_t i = 0; i < m; ++i) {
    int lhs = 0;
    for (std::size_t j = 0; j < p; ++j) lhs += x[i][j];
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = 0; k < p; ++k) {
        if (k != j) lhs += y[i][j][k];
      }
    }
    if (lhs > 1) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    int lhs = 0;
    for (std::size_t j = 0; j < p; ++j) lhs += z[i][j];
    if (lhs > 1) return false;
  }
  return true;
}

/// Random in-range assignment (k != j in triples); usually infeasible.
inline Assignment random_assignment(const DispatchInstance& inst, Rng& rng) {
  Assignment sol;
  const std::size_t m = inst.m(), n = inst.n(), p = inst.p();
  if (p == 0) return sol;
  const auto draws = rng.below(5);
  for (std::uint64_t d = 0; d < draws; ++d) {
    switch (rng.below(3)) {
      case 0:
        if (m) sol.x.insert({rng.below(m), rng.below(p)});
        break;
      case 1:
        if (m && p >= 2) {
          const auto j = rng.below(p);
          auto k = rng.below(p - 1);
          if (k >= j) ++k;
          sol.y.insert({rng.below(m), j, k});
        }
        break;
      default:
        if (n) sol.z.insert({rng.below(n), rng.below(p)});
        break;
    }
  }
  return sol;
}

/// Random feasible assignment: shuffled seats, users dealt in order.
inline std::optional<Assignment> random_feasible_assignment(const DispatchInstance& inst, Rng& rng) {
  const std::size_t m = inst.m(), n = inst.n(), p = inst.p();
  if (p > 2 * m + n) return std::nullopt;
  std::vector<std::size_t> seats;  // seat s < 2m belongs to empty vehicle s/2
  for (std::size_t s = 0; s < 2 * m + n; ++s) seats.push_back(s);
  rng.shuffle(seats);
  std::vector<std::vector<std::size_t>> riders(m);
  Assignment sol;
  for (std::size_t u = 0; u < p; ++u) {
    const auto s = seats[u];
    if (s < 2 * m) riders[s / 2].push_back(u);
    else sol.z.insert({s - 2 * m, u});
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (riders[i].size() == 1) sol.x.insert({i, riders[i][0]});
    if (riders[i].size() == 2) {
      const bool flip = rng.below(2) == 1;
      sol.y.insert({i, riders[i][flip], riders[i][!flip]});
    }
  }
  return sol;
}

/// Breadth-first shortest path length, nullopt when unreachable.
inline std::optional<std::size_t> bfs_length(const RoadNetwork& net, Cell from, Cell to) {
  std::vector<int> dist(static_cast<std::size_t>(net.width() * net.height()), -1);
  std::deque<Cell> queue{from};
  dist[net.index(from)] = 0;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    if (c == to) return static_cast<std::size_t>(dist[net.index(c)]);
    const Cell next[] = {{c.col + 1, c.row}, {c.col - 1, c.row}, {c.col, c.row + 1}, {c.col, c.row - 1}};
    for (const auto& nb : next) {
      if (!net.passable(nb) || dist[net.index(nb)] >= 0) continue;
      dist[net.index(nb)] = dist[net.index(c)] + 1;
      queue.push_back(nb);
    }
  }
  return std::nullopt;
}

/// Random maze: each cell blocked with probability `density`, endpoints kept open.
inline RoadNetwork random_maze(int w, int h, double density, Rng& rng, Cell keep_a, Cell keep_b) {
  std::vector<Cell> blocked;
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) {
      const Cell cell{c, r};
      if (cell == keep_a || cell == keep_b) continue;
      if (rng.uniform() < density) blocked.push_back(cell);
    }
  }
  return RoadNetwork(w, h, blocked);
}

}  // namespace carpool::testing

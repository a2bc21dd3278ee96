#include <benchmark/benchmark.h>

#include "carpool/model.hpp"
#include "carpool/proposer.hpp"
#include "carpool/solver.hpp"

namespace {

void BM_SolveExact(benchmark::State& state) {
  const auto s = static_cast<std::size_t>(state.range(0));
  const auto model = carpool::build_model(carpool::random_instance("bench", s, s, s, 2)).model;
  std::uint64_t nodes = 0;
  for (auto _ : state) {
    const auto result = carpool::solve_exact(model);
    nodes = result.nodes_explored;
    benchmark::DoNotOptimize(result.root_bound);
  }
  state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_SolveExact)->DenseRange(2, 8, 2);

void BM_BruteForce(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const auto inst = carpool::random_instance("bench", 2, 2, p, 3);
  for (auto _ : state) benchmark::DoNotOptimize(carpool::brute_force(inst).root_bound);
}
BENCHMARK(BM_BruteForce)->DenseRange(1, 4);

void BM_StochasticConstruct(benchmark::State& state) {
  const auto inst = carpool::random_instance("bench", 6, 6, 6, 4);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(carpool::stochastic_construct(inst, 1.0, seed++).complete);
}
BENCHMARK(BM_StochasticConstruct);

}  // namespace

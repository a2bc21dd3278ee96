#include <benchmark/benchmark.h>

#include "carpool/model.hpp"

namespace {

void BM_BuildModel(benchmark::State& state) {
  const auto s = static_cast<std::size_t>(state.range(0));
  const auto inst = carpool::random_instance("bench", s, s, s, 1);
  for (auto _ : state) {
    auto built = carpool::build_model(inst);
    benchmark::DoNotOptimize(built.model.rows.data());
  }
  state.counters["cols"] = static_cast<double>(carpool::matrix_shape(s, s, s).cols);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildModel)->RangeMultiplier(2)->Range(5, 80)->Complexity(benchmark::oNCubed);

}  // namespace

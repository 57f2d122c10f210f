#include <benchmark/benchmark.h>

#include "dynpath/oracle.hpp"
#include "dynpath/pgf.hpp"

namespace {

using namespace dynpath;

PathSpec mixed_path(std::size_t n, FailureModel model, LengthDist len) {
  std::vector<LinkBit> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = (j % 3) == 0;
  return PathSpec(EdgeDynamics(0.3, 0.2), model, std::move(x), std::vector<LengthDist>(n, len));
}

void BM_Ett(benchmark::State& state) {
  const auto path = mixed_path(static_cast<std::size_t>(state.range(0)), FailureModel::CantStart,
                               LengthDist::Constant(1));
  for (auto _ : state) benchmark::DoNotOptimize(ett(path).total);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Ett)->RangeMultiplier(2)->Range(250, 2000)->Complexity(benchmark::oNSquared)
    ->Unit(benchmark::kMillisecond);

void BM_Pmf(benchmark::State& state) {
  const auto path = mixed_path(static_cast<std::size_t>(state.range(0)), FailureModel::Resume,
                               LengthDist::Pmf({{0, 0.5}, {2, 0.5}}));
  for (auto _ : state) benchmark::DoNotOptimize(pmf(path, 512).tail_mass);
}
BENCHMARK(BM_Pmf)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ExactDp(benchmark::State& state) {
  const auto path = mixed_path(static_cast<std::size_t>(state.range(0)),
                               FailureModel::RetransmitResampled, LengthDist::Pmf({{1, 0.5}, {3, 0.5}}));
  for (auto _ : state) benchmark::DoNotOptimize(exact_ett_dp(path));
}
BENCHMARK(BM_ExactDp)->DenseRange(2, 10, 4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

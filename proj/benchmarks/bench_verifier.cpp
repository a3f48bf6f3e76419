#include <benchmark/benchmark.h>

#include "bot/verifier.hpp"

namespace {

void BM_LowerBoundGamma2(benchmark::State& state) {
  const bot::Cuboid c{0.6, 0.61, 0.1, 0.11, 0.45, 0.46};
  for (auto _ : state) benchmark::DoNotOptimize(bot::lower_bound_gamma2(c));
}
BENCHMARK(BM_LowerBoundGamma2);

void BM_VerifyRegion(benchmark::State& state) {
  const double eps = 1.0 / static_cast<double>(state.range(0));
  long long cuboids = 0;
  for (auto _ : state) cuboids += bot::verify_region(eps, eps, 1e-4, 40, 1).cuboids_processed;
  state.counters["cuboids"] = benchmark::Counter(static_cast<double>(cuboids), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_VerifyRegion)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

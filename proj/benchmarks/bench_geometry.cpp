#include <benchmark/benchmark.h>

#include "bot/geometry.hpp"
#include "bot/problem.hpp"
#include "bot/random.hpp"
#include "bot/topology.hpp"

namespace {

void BM_IrlsIteration(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const bot::Problem p = bot::generate_random_problem(n, 1);
  bot::Rng rng(1);
  const bot::Topology t = bot::random_full_topology(n, rng);
  const auto flows = bot::compute_edge_flows(t, p);
  const auto coords = bot::assemble_coords(p, bot::random_bp_coords(p, t.n_bps(), rng));
  for (auto _ : state) benchmark::DoNotOptimize(bot::irls_iteration(t, coords, flows, p.alpha, 1e-7));
  state.SetComplexityN(n);
}
BENCHMARK(BM_IrlsIteration)->RangeMultiplier(4)->Range(8, 8192)->Complexity(benchmark::oN);

void BM_OptimizeBranchingPoints(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const bot::Problem p = bot::generate_random_problem(n, 2);
  bot::Rng rng(2);
  const bot::Topology t = bot::random_full_topology(n, rng);
  long long iterations = 0;
  for (auto _ : state) {
    const auto r = bot::optimize_branching_points(t, p, std::uint64_t{2});
    iterations += r.iterations;
    benchmark::DoNotOptimize(r.cost);
  }
  state.counters["iterations"] = benchmark::Counter(static_cast<double>(iterations), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_OptimizeBranchingPoints)->Arg(10)->Arg(100)->Arg(1000);

}  // namespace

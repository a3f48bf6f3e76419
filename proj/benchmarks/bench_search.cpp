#include <benchmark/benchmark.h>

#include "bot/problem.hpp"
#include "bot/search.hpp"

namespace {

void BM_GreedyHeuristic(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const bot::Problem p = bot::generate_random_problem(n, 3);
  bot::HeuristicConfig config;
  config.seed = 3;
  for (auto _ : state) benchmark::DoNotOptimize(bot::greedy_heuristic(p, config).cost);
}
BENCHMARK(BM_GreedyHeuristic)->Arg(10)->Arg(30)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_BruteForce(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const bot::Problem p = bot::generate_random_problem(n, 4);
  bot::BruteForceConfig config;
  config.seed = 4;
  config.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(bot::brute_force(p, config).cost);
}
BENCHMARK(BM_BruteForce)->DenseRange(5, 8)->Unit(benchmark::kMillisecond);

}  // namespace

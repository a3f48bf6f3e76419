#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "bot/json_io.hpp"
#include "bot/search.hpp"
#include "support/fixtures.hpp"

namespace bot {
namespace {

using testing::make_problem;

SolverConfig tight() {
  SolverConfig c;
  c.eta = 1e-12;
  c.max_iters = 100000;
  return c;
}

TEST(EdgeNodeDistance, PointSegmentCases) {
  const std::vector<double> a{-1.0, 0.0};
  const std::vector<double> b{1.0, 0.0};
  EXPECT_NEAR(edge_node_distance(a, b, std::vector<double>{0.3, 0.0}), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(edge_node_distance(a, b, std::vector<double>{0.0, 1.0}), 1.0);
  EXPECT_DOUBLE_EQ(edge_node_distance(a, b, std::vector<double>{2.0, 1.0}), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(edge_node_distance(a, a, std::vector<double>{2.0, 0.0}), 3.0);
}

TEST(KernelProbabilities, GaussianRatio) {
  const std::vector<double> d{0.2, 0.4};
  const auto p = kernel_probabilities(d, 1.0);
  EXPECT_NEAR(p[0] / p[1], std::exp(3.0), 1e-9);
  EXPECT_NEAR(p[0] / p[1], 20.0855, 1e-4);
  EXPECT_NEAR(p[0] + p[1], 1.0, 1e-15);
}

TEST(KernelProbabilities, WidthFactorFlattens) {
  const std::vector<double> d{1.0, 2.0, 3.0};
  const auto narrow = kernel_probabilities(d, 0.5);
  const auto wide = kernel_probabilities(d, 4.0);
  EXPECT_GT(narrow[0], wide[0]);
  EXPECT_LT(narrow[2], wide[2]);
}

TEST(KernelProbabilities, ZeroDistanceIsUniformOverTouchingEdges) {
  const std::vector<double> d{0.0, 0.5, 0.0, 1.0};
  const auto p = kernel_probabilities(d, 1.0);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.0);
  EXPECT_DOUBLE_EQ(p[2], 0.5);
  EXPECT_DOUBLE_EQ(p[3], 0.0);
}

TEST(KernelProbabilities, FarEdgesStayFinite) {
  const std::vector<double> d{1e-3, 1.0};
  const auto p = kernel_probabilities(d, 1.0);
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_EQ(p[1], 0.0);
}

TEST(GreedyStep, ThreeTerminalMovesAreRejected) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Problem p = generate_random_problem(3, seed);
    HeuristicConfig config;
    config.geometry = tight();
    Rng rng(seed);
    const Topology star = star_topology(p);
    const SearchState state = make_state(p, star, random_bp_coords(p, 1, rng), config.geometry);
    for (int e = 0; e < 3; ++e) {
      // the far side is a single merged edge, which is never a reconnection target
      const auto out = greedy_step(p, state, e, config, rng);
      EXPECT_FALSE(out.accepted);
      EXPECT_FALSE(out.candidate);
    }
  }
}

TEST(GreedyStep, DetachesSmallerSideAndKeepsBpsCubic) {
  const Problem p = generate_random_problem(8, 4);
  Rng rng(4);
  HeuristicConfig config;
  const Topology t = random_full_topology(8, rng);
  const SearchState state = make_state(p, t, random_bp_coords(p, t.n_bps(), rng), config.geometry);
  for (int e = 0; e < static_cast<int>(t.edges().size()); ++e) {
    const auto out = greedy_step(p, state, e, config, rng);
    ASSERT_TRUE(out.candidate);
    const Topology& c = out.candidate->topology;
    ASSERT_TRUE(is_tree(c));
    EXPECT_TRUE(c.is_full());
    EXPECT_EQ(out.candidate->bp_coords.size(), static_cast<std::size_t>(c.n_bps()));
  }
}

TEST(GreedyStep, NeverRebuildsTheCurrentTree) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Problem p = generate_random_problem(7, seed);
    Rng rng(seed);
    HeuristicConfig config;
    const Topology t = random_full_topology(7, rng);
    const SearchState state = make_state(p, t, random_bp_coords(p, t.n_bps(), rng), config.geometry);
    for (int e = 0; e < static_cast<int>(t.edges().size()); ++e)
      for (int draw = 0; draw < 5; ++draw) {
        const auto out = greedy_step(p, state, e, config, rng);
        if (out.candidate) {
          EXPECT_NE(canonical_form(out.candidate->topology), canonical_form(t));
        }
      }
  }
}

TEST(GreedyStep, SpanningTreeEdgesGainBranchingPoints) {
  const Problem p = generate_random_problem(6, 9);
  Rng rng(9);
  HeuristicConfig config;
  const SearchState state = make_state(p, mst_topology(p), PointSet(0, 2), config.geometry);
  const auto out = greedy_step(p, state, 0, config, rng);
  ASSERT_TRUE(out.candidate);
  EXPECT_EQ(out.candidate->topology.n_bps(), 1);
  EXPECT_TRUE(is_tree(out.candidate->topology));
}

TEST(GreedyStep, AcceptedMovesStrictlyLowerCost) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Problem p = generate_random_problem(7, seed);
    Rng rng(seed);
    HeuristicConfig config;
    config.min_improvement = 0.0;
    SearchState state = make_state(p, star_topology(p), random_bp_coords(p, 1, rng), config.geometry);
    for (int step = 0; step < 60; ++step) {
      const auto out = greedy_step(p, state, config, rng);
      if (!out.candidate) continue;
      EXPECT_EQ(out.accepted, out.candidate->cost < state.cost);
      if (out.accepted) state = *out.candidate;
    }
  }
}

TEST(GreedyHeuristic, DeterministicForSeed) {
  const Problem p = generate_random_problem(7, 21);
  HeuristicConfig config;
  config.seed = 5;
  const Solution a = greedy_heuristic(p, config);
  const Solution b = greedy_heuristic(p, config);
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_EQ(a.topology, b.topology);
  EXPECT_EQ(a.meta.iterations_tried, b.meta.iterations_tried);
}

TEST(GreedyHeuristic, ThreeTerminalsTerminateAtOnce) {
  const Problem p = generate_random_problem(3, 2);
  HeuristicConfig config;
  config.init = InitialTopology::Star;
  const Solution s = greedy_heuristic(p, config);
  EXPECT_EQ(s.meta.iterations_accepted, 0);
  EXPECT_EQ(s.meta.iterations_tried, 3);
}

TEST(GreedyHeuristic, TwoTerminalsUseSingleEdge) {
  const Problem p = make_problem(0.3, {{{0.0, 0.0}, 1.0}, {{3.0, 4.0}, -1.0}});
  const Solution s = greedy_heuristic(p);
  EXPECT_EQ(s.topology.edges().size(), 1u);
  EXPECT_DOUBLE_EQ(s.cost, 5.0);
}

TEST(GreedyHeuristic, SolutionIsConsistent) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Problem p = generate_random_problem(6, seed, 2 + static_cast<int>(seed % 3));
    HeuristicConfig config;
    config.seed = seed;
    config.init = seed % 2 ? InitialTopology::Star : InitialTopology::Mst;
    const Solution s = greedy_heuristic(p, config);
    ASSERT_TRUE(is_tree(s.topology));
    const auto flows = compute_edge_flows(s.topology, p);
    for (double r : conservation_residuals(s.topology, s.flows, terminal_masses(p))) EXPECT_NEAR(r, 0.0, 1e-9);
    for (std::size_t e = 0; e < flows.flow.size(); ++e) EXPECT_NEAR(flows.flow[e], s.flows.flow[e], 1e-12);
    EXPECT_NEAR(bot_cost(s.topology, s.all_coords(), s.flows, p.alpha), s.cost, 1e-12 * s.cost);
    EXPECT_GE(s.meta.iterations_tried, s.meta.iterations_accepted);
    EXPECT_EQ(s.meta.method, std::string("heuristic/") + to_string(config.init));
  }
}

TEST(GreedyHeuristic, SquareMatchesExactSolution) {
  const Problem p =
      make_problem(0.5, {{{0.0, 1.0}, 0.5}, {{1.0, 1.0}, 0.5}, {{0.0, 0.0}, -0.5}, {{1.0, 0.0}, -0.5}});
  const Solution exact = brute_force(p);
  int matched = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    HeuristicConfig config;
    config.seed = seed;
    matched += std::abs(greedy_heuristic(p, config).cost / exact.cost - 1.0) <= 1e-4;
  }
  EXPECT_GE(matched, 95);
}

TEST(GreedyHeuristic, GivenTopologyIsRespected) {
  const Problem p = generate_random_problem(5, 3);
  HeuristicConfig config;
  config.init = InitialTopology::Given;
  EXPECT_THROW(greedy_heuristic(p, config), std::invalid_argument);
  config.given = star_topology(p);
  const Solution s = greedy_heuristic(p, config);
  EXPECT_TRUE(is_tree(s.topology));
  config.given = star_topology(generate_random_problem(4, 3));
  EXPECT_THROW(greedy_heuristic(p, config), std::invalid_argument);
}

TEST(InitialTopology, NamesRoundTrip) {
  for (auto i : {InitialTopology::Star, InitialTopology::Mst, InitialTopology::Given})
    EXPECT_EQ(initial_topology_from_string(to_string(i)), i);
  EXPECT_THROW(initial_topology_from_string("ring"), std::invalid_argument);
}

TEST(BruteForce, ThreeTerminalsOptimizeOnce) {
  const Problem p = generate_random_problem(3, 6);
  std::vector<double> costs;
  const Solution s = brute_force(p, {}, &costs);
  EXPECT_EQ(costs.size(), 1u);
  EXPECT_EQ(s.meta.topologies_evaluated, 1u);
}

TEST(BruteForce, ReturnsMinimumOverTopologies) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Problem p = generate_random_problem(6, seed);
    std::vector<double> costs;
    const Solution s = brute_force(p, {}, &costs);
    ASSERT_EQ(costs.size(), 105u);
    for (double c : costs) EXPECT_LE(s.cost, c);
    EXPECT_EQ(s.cost, *std::min_element(costs.begin(), costs.end()));
    EXPECT_TRUE(s.topology.is_full());
  }
}

TEST(BruteForce, IndependentOfWorkerCount) {
  const Problem p = generate_random_problem(6, 12);
  BruteForceConfig one;
  one.workers = 1;
  BruteForceConfig four;
  four.workers = 4;
  std::vector<double> a;
  std::vector<double> b;
  EXPECT_EQ(brute_force(p, one, &a).cost, brute_force(p, four, &b).cost);
  EXPECT_EQ(a, b);
}

TEST(BruteForce, RejectsOutOfRangeSizes) {
  EXPECT_THROW(brute_force(generate_random_problem(11, 1)), std::invalid_argument);
  EXPECT_THROW(brute_force(generate_random_problem(2, 1)), std::invalid_argument);
  BruteForceConfig c;
  c.cap = 4;
  EXPECT_THROW(brute_force(generate_random_problem(5, 1), c), std::invalid_argument);
}

TEST(BruteForce, LowerBoundsTheHeuristic) {
  for (int n = 3; n <= 6; ++n)
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const Problem p = generate_random_problem(n, 100 * static_cast<std::uint64_t>(n) + seed);
      BruteForceConfig bc;
      bc.geometry = tight();
      const double exact = brute_force(p, bc).cost;
      for (std::uint64_t hs = 0; hs < 3; ++hs) {
        HeuristicConfig hc;
        hc.seed = hs;
        hc.geometry = tight();
        const double heuristic = greedy_heuristic(p, hc).cost;
        EXPECT_LE(exact, heuristic + 1e-9) << exact - heuristic << " at n=" << n << " seed=" << seed << '/' << hs;
      }
    }
}

TEST(BruteForce, HigherDimensionsStayClose) {
  for (int dim = 3; dim <= 5; ++dim) {
    double ratio_sum = 0.0;
    const int count = 30;
    for (int i = 0; i < count; ++i) {
      const Problem p = generate_random_problem(6, derive_seed(static_cast<std::uint64_t>(dim), static_cast<std::uint64_t>(i)), dim);
      HeuristicConfig hc;
      hc.seed = static_cast<std::uint64_t>(i);
      ratio_sum += greedy_heuristic(p, hc).cost / brute_force(p).cost;
    }
    EXPECT_LE(ratio_sum / count, 1.03) << dim;
  }
}

TEST(SolutionJson, RoundTrip) {
  const Problem p = generate_random_problem(6, 33, 3);
  HeuristicConfig config;
  config.seed = 4;
  const Solution s = greedy_heuristic(p, config);
  const Solution r = solution_from_json(nlohmann::json::parse(to_json(s).dump()));
  EXPECT_EQ(r.problem, s.problem);
  EXPECT_EQ(r.topology, s.topology);
  EXPECT_EQ(r.bp_coords, s.bp_coords);
  EXPECT_EQ(r.flows.flow, s.flows.flow);
  EXPECT_EQ(r.cost, s.cost);
  EXPECT_EQ(r.meta.method, s.meta.method);
  EXPECT_EQ(r.meta.iterations_tried, s.meta.iterations_tried);

  const auto path = std::filesystem::temp_directory_path() / "bot_solution_roundtrip.json";
  save_solution(s, path);
  EXPECT_EQ(load_solution(path).cost, s.cost);
  std::filesystem::remove(path);
}

TEST(SolutionJson, RejectsMismatchedParts) {
  const Problem p = generate_random_problem(5, 2);
  auto j = to_json(greedy_heuristic(p));
  j["flows"].push_back(0.0);
  EXPECT_THROW(solution_from_json(j), ParseError);
}

}  // namespace
}  // namespace bot

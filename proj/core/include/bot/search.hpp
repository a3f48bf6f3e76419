#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bot/geometry.hpp"
#include "bot/point_set.hpp"
#include "bot/problem.hpp"
#include "bot/random.hpp"
#include "bot/topology.hpp"

namespace bot {

enum class InitialTopology { Star, Mst, Given };

const char* to_string(InitialTopology init);
/// Accepts "star", "mst" and "given"; throws std::invalid_argument otherwise.
InitialTopology initial_topology_from_string(const std::string& name);

struct HeuristicConfig {
  /// Width factor of the reconnection kernel exp(-d^2 / (omega * d_min)^2).
  double omega = 1.0;
  std::uint64_t seed = 0;
  SolverConfig geometry;
  InitialTopology init = InitialTopology::Mst;
  /// A move is accepted iff it lowers the cost by more than this fraction; 0 is strict acceptance.
  double min_improvement = 0.0;
  /// Starting topology when init is Given.
  std::optional<Topology> given;

  /// Throws std::invalid_argument unless omega > 0, min_improvement is in [0,1), the geometry
  /// config is valid, and a topology is supplied for Given.
  void validate() const;
};

struct SolutionMeta {
  std::string method;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  /// Edges tried as removal candidates, and moves accepted.
  int iterations_tried = 0;
  int iterations_accepted = 0;
  std::uint64_t topologies_evaluated = 0;
  int geometry_iterations = 0;
  bool geometry_converged = true;
  double wall_seconds = 0.0;
};

struct Solution {
  Problem problem;
  Topology topology;
  PointSet bp_coords;
  FlowAssignment flows;
  double cost = 0.0;
  SolutionMeta meta;

  PointSet all_coords() const { return assemble_coords(problem, bp_coords); }
};

nlohmann::json to_json(const Solution& solution);
/// Throws ParseError on malformed content.
Solution solution_from_json(const nlohmann::json& j);
Solution load_solution(const std::filesystem::path& path);
void save_solution(const Solution& solution, const std::filesystem::path& path);

/// Distance from `point` to the segment x_i x_j.
double edge_node_distance(std::span<const double> xi, std::span<const double> xj, std::span<const double> point);

/// Normalized reconnection probabilities for edges at the given distances. With d_min = 0 the
/// mass is spread uniformly over the zero-distance edges.
std::vector<double> kernel_probabilities(std::span<const double> distances, double omega);

/// Current topology with optimized geometry.
struct SearchState {
  Topology topology;
  PointSet bp_coords;
  FlowAssignment flows;
  double cost = 0.0;
  int geometry_iterations = 0;
  bool geometry_converged = true;
};

struct StepOutcome {
  bool accepted = false;
  /// Candidate evaluated by the move (set unless the move was impossible).
  std::optional<SearchState> candidate;
};

/// Optimizes the geometry of `t` from `init_bp` and packages it as a state.
SearchState make_state(const Problem& problem, Topology t, const PointSet& init_bp, const SolverConfig& config);

/// Edge-removal-and-reconnection move on edge `removed`: detaches the smaller side of the cut,
/// deletes a BP left with degree 2, splices the detached endpoint onto a kernel-sampled edge of
/// the other side through a new BP, reoptimizes, and accepts iff the cost drops by more than
/// config.min_improvement relative to the current cost.
StepOutcome greedy_step(const Problem& problem, const SearchState& state, int removed, const HeuristicConfig& config,
                        Rng& rng);
/// Same move with the removed edge drawn uniformly.
StepOutcome greedy_step(const Problem& problem, const SearchState& state, const HeuristicConfig& config, Rng& rng);

/// Greedy randomized topology search: edges are tried without replacement until a move is
/// accepted (the candidate list then resets) or every edge fails.
Solution greedy_heuristic(const Problem& problem, const HeuristicConfig& config = {});

inline constexpr int kBruteForceTerminalCap = 10;

struct BruteForceConfig {
  std::uint64_t seed = 0;
  SolverConfig geometry;
  int cap = kBruteForceTerminalCap;
  /// Worker threads (0 = worker_count()).
  unsigned workers = 0;
};

/// Optimizes every full topology from a seeded random start and keeps the cheapest (first on
/// ties). `per_topology_costs`, if given, receives the cost per topology index.
Solution brute_force(const Problem& problem, const BruteForceConfig& config = {},
                     std::vector<double>* per_topology_costs = nullptr);

}  // namespace bot

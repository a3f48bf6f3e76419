#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bot/point_set.hpp"
#include "bot/problem.hpp"
#include "bot/random.hpp"

namespace bot {

/// Undirected edge between node ids. Terminals are 0..n-1, branching points n..n+m-1.
struct Edge {
  int u = 0;
  int v = 0;
  auto operator<=>(const Edge&) const = default;
};

class InvalidTopology : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Tree over terminals and branching points (BPs). Construction does not validate;
/// call require_tree() where a tree is required.
class Topology {
 public:
  Topology() = default;
  Topology(int n_terminals, int n_bps, std::vector<Edge> edges)
      : n_terminals_(n_terminals), n_bps_(n_bps), edges_(std::move(edges)) {}

  int n_terminals() const { return n_terminals_; }
  int n_bps() const { return n_bps_; }
  int n_nodes() const { return n_terminals_ + n_bps_; }
  bool is_terminal(int node) const { return node < n_terminals_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::vector<int> degrees() const;
  /// Neighbor ids per node, in edge order.
  std::vector<std::vector<int>> adjacency() const;
  /// Incident edge indices per node, in edge order.
  std::vector<std::vector<int>> incident_edges() const;

  /// Terminals of degree 1, BPs of degree 3, n-2 BPs.
  bool is_full() const;

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  int n_terminals_ = 0;
  int n_bps_ = 0;
  std::vector<Edge> edges_;
};

/// Empty when `t` is a tree on all of its nodes with in-range, loop-free edges.
std::vector<std::string> tree_violations(const Topology& t);
bool is_tree(const Topology& t);
/// Throws InvalidTopology describing the first violation.
void require_tree(const Topology& t);

/// Signed flow per edge: positive means mass moves from edges()[e].u to edges()[e].v.
struct FlowAssignment {
  std::vector<double> flow;
};

/// Unique conservation-respecting flows by elimination on the leaves, O(n+m).
/// Throws InvalidTopology if `t` is not a tree or does not match the problem's terminal count.
FlowAssignment compute_edge_flows(const Topology& t, const Problem& problem);
FlowAssignment compute_edge_flows(const Topology& t, std::span<const double> terminal_mu);

/// Net outflow minus supply at every node (zero for a valid assignment).
std::vector<double> conservation_residuals(const Topology& t, const FlowAssignment& flows,
                                           std::span<const double> terminal_mu);

std::vector<double> terminal_masses(const Problem& problem);

/// (2n-5)!!, the number of full tree topologies on n >= 3 terminals.
std::uint64_t full_topology_count(int n);

/// Builds the full topology obtained by inserting terminals 3..n-1 one at a time:
/// terminal k is attached through BP n+k-2 onto edge choices[k-3] of the current tree
/// (which has 2k-3 edges). Terminals 0,1,2 start joined at BP n.
Topology full_topology_from_choices(int n, std::span<const int> choices);

/// Full topology with the given index in [0, (2n-5)!!), mixed-radix over insertion choices.
Topology full_topology_from_index(int n, std::uint64_t index);

/// Uniformly random full topology.
Topology random_full_topology(int n, Rng& rng);

/// Yields every full tree topology on n terminals exactly once.
class FullTopologyEnumerator {
 public:
  explicit FullTopologyEnumerator(int n);

  std::optional<Topology> next();
  std::uint64_t total() const { return total_; }

 private:
  int n_;
  std::uint64_t total_;
  std::vector<int> choices_;
  bool done_ = false;
};

/// One BP of degree n joined to every terminal.
Topology star_topology(const Problem& problem);

/// Euclidean minimum spanning tree over the terminals (no BPs). Ties broken by (i, j).
Topology mst_topology(const Problem& problem);

/// Label-independent form: BPs renumbered in BFS order from terminal 0, children ordered by the
/// smallest terminal id of their subtree; edges normalized (u < v) and sorted.
std::vector<Edge> canonical_form(const Topology& t);

struct BpCluster {
  std::vector<int> bps;
  std::vector<int> effective_neighbors;
  int effective_degree = 0;
  /// Terminal within the cluster tolerance, or -1.
  int coincident_terminal = -1;
  bool coincides_with_terminal() const { return coincident_terminal >= 0; }
};

/// Single-linkage clusters of BP positions at distance <= cluster_tol. `coords` holds all nodes.
std::vector<BpCluster> detect_coupled_bps(const Topology& t, const PointSet& coords, double cluster_tol);

nlohmann::json to_json(const Topology& t);
Topology topology_from_json(const nlohmann::json& j);

}  // namespace bot

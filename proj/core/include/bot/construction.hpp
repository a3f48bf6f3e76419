#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bot/angles.hpp"
#include "bot/point_set.hpp"
#include "bot/problem.hpp"
#include "bot/topology.hpp"

namespace bot {

using Vec2 = std::array<double, 2>;

/// Auxiliary point summarizing the subtree below one BP, and the circle through the pivot and
/// the two child representatives on which the BP must lie.
struct PivotRecord {
  int bp = -1;
  Vec2 pivot{};
  Vec2 center{};
  double radius = 0.0;
  /// Half-plane of the pivot relative to the directed chord child1 -> child2.
  int side = 1;
  std::array<int, 2> child_pair{};
  /// Representative positions of the two children (terminal position or child pivot).
  std::array<Vec2, 2> child_points{};
  double angle1 = 0.0;
  double angle2 = 0.0;
  BranchingMode mode = BranchingMode::Symmetric;
};

struct ConstructionResult {
  bool success = false;
  std::string failure;
  int root = 0;
  /// One row per BP; meaningful only on success.
  PointSet bp_coords;
  std::vector<BranchingKind> classes;
  /// +1 or -1 per BP.
  std::vector<int> side_choices;
  std::vector<PivotRecord> pivots;
  double cost = 0.0;
};

struct SingleBranching {
  Vec2 bp{};
  BranchingClass branching;
};

/// Optimal BP joining parent a0 to children a1, a2 (flow magnitudes m1, m2). V/L branchings
/// return the respective terminal; Y branchings intersect the segment a0 -> pivot with the circle.
/// A numerically tangent intersection falls back to the nearest valid point and is flagged transient.
SingleBranching optimal_bp_single(const Vec2& a0, const Vec2& a1, const Vec2& a2, double m1, double m2, double alpha,
                                  BranchingMode mode);

/// Relatively optimal 2D geometry of a full topology by pivot construction rooted at terminal
/// `root`. side_choices[b] selects the pivot half-plane for BP n+b. Failure is reported in the
/// result, not thrown. Throws std::invalid_argument for a non-full topology, a non-2D problem,
/// or a wrong number of side choices.
ConstructionResult construct_ros(const Topology& t, const Problem& problem, int root, const std::vector<int>& side_choices);

inline constexpr int kConstructionTerminalCap = 12;

struct ExhaustiveConstruction {
  /// Cheapest successful construction, or the last failure when none succeeded.
  ConstructionResult best;
  int combinations_tried = 0;
  int successes = 0;
};

/// Tries all 2^(n-2) side choices. Throws std::invalid_argument when n exceeds `cap`.
ExhaustiveConstruction construct_ros_exhaustive(const Topology& t, const Problem& problem, int root = 0,
                                                int cap = kConstructionTerminalCap);

/// Pivot circles, pivots and BPs as JSON for figure rendering.
nlohmann::json to_json(const ConstructionResult& result);

}  // namespace bot

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bot/point_set.hpp"
#include "bot/problem.hpp"
#include "bot/random.hpp"
#include "bot/topology.hpp"

namespace bot {

/// Settings for the iteratively reweighted branching-point optimizer.
struct SolverConfig {
  /// Stop once the relative cost improvement of one iteration drops to eta or below.
  double eta = 1e-6;
  int max_iters = 2000;
  /// Floor applied to edge lengths in the reweighting denominators, relative to the diagonal of
  /// the terminals' bounding box.
  double clip = 1e-7;
  /// Edge-length exponent of the cost; 1 is branched transport.
  double beta = 1.0;
  /// After convergence, move BPs onto neighbors where that is cheaper and resume iterating.
  bool snap = true;

  /// Throws std::invalid_argument unless eta > 0, clip > 0, beta >= 1 and max_iters >= 0.
  void validate() const;
};

struct GeometryResult {
  /// One row per BP (node id n + row).
  PointSet bp_coords;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Snapping rounds that lowered the cost.
  int snap_rounds = 0;
  /// Cost before the first iteration followed by the cost after every iteration and every
  /// snapping round.
  std::vector<double> cost_trace;
};

/// |flow|^alpha with 0^0 = 1.
double flow_weight(double flow, double alpha);

/// sum_e |flow_e|^alpha * ||x_u - x_v||^beta over all edges. `coords` holds every node.
double bot_cost(const Topology& t, const PointSet& coords, const FlowAssignment& flows, double alpha,
                double beta = 1.0);

/// Terminal positions followed by the BP rows.
PointSet assemble_coords(const Problem& problem, const PointSet& bp_coords);

/// BPs uniform in the axis-aligned bounding box of the terminals.
PointSet random_bp_coords(const Problem& problem, int n_bps, Rng& rng);

/// One reweighted step: minimizes sum_e w_e ||x_u - x_v||^2 with w_e = |flow_e|^alpha *
/// max(len_e, clip)^(beta-2) frozen at `coords`, solved exactly by elimination on the leaves of
/// the BP forest, independently per coordinate axis. Returns the new BP rows.
PointSet irls_iteration(const Topology& t, const PointSet& coords, const FlowAssignment& flows, double alpha,
                        double clip, double beta = 1.0);

/// Runs irls_iteration until the relative improvement is at most eta or max_iters is reached,
/// then snaps collapsed BPs onto their neighbors (see SolverConfig::snap).
GeometryResult optimize_branching_points(const Topology& t, const Problem& problem, const PointSet& init_bp,
                                         const SolverConfig& config = {});
GeometryResult optimize_branching_points(const Topology& t, const Problem& problem, std::uint64_t seed,
                                         const SolverConfig& config = {});
/// Variant reusing precomputed flows.
GeometryResult optimize_branching_points(const Topology& t, const Problem& problem, const FlowAssignment& flows,
                                         const PointSet& init_bp, const SolverConfig& config = {});

struct BpGradient {
  /// One row per BP; rows of undefined BPs are zero.
  PointSet gradient;
  /// False where some incident edge is no longer than the clip length.
  std::vector<bool> defined;

  /// Max-norm over the defined BPs.
  double max_norm() const;
};

/// Analytic gradient of the cost with respect to each BP position.
BpGradient bp_gradient(const Topology& t, const PointSet& coords, const FlowAssignment& flows, double alpha,
                       double clip = 1e-7, double beta = 1.0);

}  // namespace bot

#include "bot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bot {

void SolverConfig::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("SolverConfig: eta must be positive");
  if (!(clip > 0.0)) throw std::invalid_argument("SolverConfig: clip must be positive");
  if (!(beta >= 1.0)) throw std::invalid_argument("SolverConfig: beta must be at least 1");
  if (max_iters < 0) throw std::invalid_argument("SolverConfig: max_iters must be non-negative");
}

double flow_weight(double flow, double alpha) { return std::pow(std::abs(flow), alpha); }

double bot_cost(const Topology& t, const PointSet& coords, const FlowAssignment& flows, double alpha, double beta) {
  double cost = 0.0;
  const auto& edges = t.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double len = distance(coords[static_cast<std::size_t>(edges[e].u)], coords[static_cast<std::size_t>(edges[e].v)]);
    const double w = flow_weight(flows.flow[e], alpha);
    if (w == 0.0) continue;
    cost += w * (beta == 1.0 ? len : std::pow(len, beta));
  }
  return cost;
}

PointSet assemble_coords(const Problem& problem, const PointSet& bp_coords) {
  PointSet all = problem.positions();
  for (std::size_t i = 0; i < bp_coords.size(); ++i) all.push_back(bp_coords[i]);
  return all;
}

PointSet random_bp_coords(const Problem& problem, int n_bps, Rng& rng) {
  const auto box = bounding_box(problem);
  PointSet bps(static_cast<std::size_t>(n_bps), problem.dim);
  for (int b = 0; b < n_bps; ++b) {
    auto row = bps[static_cast<std::size_t>(b)];
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = box.lo[k] + uniform01(rng) * (box.hi[k] - box.lo[k]);
  }
  return bps;
}

namespace {

// Elimination on the leaves of the forest spanned by BP-BP edges. Terminals enter the
// right-hand side as constants.
class LeafEliminationSolver {
 public:
  LeafEliminationSolver(const Topology& t, const PointSet& coords, const std::vector<double>& coeff, double clip,
                        double beta)
      : n_(t.n_terminals()), m_(t.n_bps()), dim_(coords.dim()) {
    const auto& edges = t.edges();
    diag_.assign(static_cast<std::size_t>(m_), 0.0);
    rhs_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(dim_), 0.0);
    bp_adj_.assign(static_cast<std::size_t>(m_), {});
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const int u = edges[e].u;
      const int v = edges[e].v;
      if (t.is_terminal(u) && t.is_terminal(v)) continue;
      const double len = distance(coords[static_cast<std::size_t>(u)], coords[static_cast<std::size_t>(v)]);
      const double floored = std::max(len, clip);
      const double w = beta == 1.0 ? coeff[e] / floored : coeff[e] * std::pow(floored, beta - 2.0);
      add_half(t, coords, u, v, w);
      add_half(t, coords, v, u, w);
      if (!t.is_terminal(u) && !t.is_terminal(v)) {
        bp_adj_[static_cast<std::size_t>(u - n_)].push_back({v - n_, w});
        bp_adj_[static_cast<std::size_t>(v - n_)].push_back({u - n_, w});
      }
    }
  }

  PointSet solve(const PointSet& coords) {
    const auto m = static_cast<std::size_t>(m_);
    const auto d = static_cast<std::size_t>(dim_);
    std::vector<int> remaining(m);
    for (std::size_t i = 0; i < m; ++i) remaining[i] = static_cast<int>(bp_adj_[i].size());
    std::vector<char> done(m, 0);
    std::vector<int> order;
    order.reserve(m);
    std::vector<int> elim_parent(m, -1);
    std::vector<double> ratio(m, 0.0);

    std::vector<int> queue;
    queue.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
      if (remaining[i] <= 1) queue.push_back(static_cast<int>(i));

    PointSet out(m, dim_);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto i = static_cast<std::size_t>(queue[head]);
      if (done[i]) continue;
      done[i] = 1;
      order.push_back(static_cast<int>(i));
      int p = -1;
      double w = 0.0;
      for (const auto& [j, wj] : bp_adj_[i]) {
        if (!done[static_cast<std::size_t>(j)]) {
          p = j;
          w = wj;
          break;
        }
      }
      double* b_i = &rhs_[i * d];
      if (diag_[i] <= 0.0) {
        // all incident weights vanish: the position does not affect the cost, keep it
        for (std::size_t k = 0; k < d; ++k) b_i[k] = coords[static_cast<std::size_t>(n_) + i][k];
        ratio[i] = 0.0;
      } else {
        for (std::size_t k = 0; k < d; ++k) b_i[k] /= diag_[i];
        ratio[i] = p >= 0 ? w / diag_[i] : 0.0;
      }
      // b_i now holds the constant part c_i of x_i = c_i + ratio_i * x_p
      if (p >= 0) {
        const auto pp = static_cast<std::size_t>(p);
        elim_parent[i] = p;
        diag_[pp] -= w * ratio[i];
        double* b_p = &rhs_[pp * d];
        for (std::size_t k = 0; k < d; ++k) b_p[k] += w * b_i[k];
        if (--remaining[pp] <= 1) queue.push_back(p);
      }
    }
    if (order.size() != m) throw std::logic_error("irls_iteration: BP subgraph is not a forest");

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto i = static_cast<std::size_t>(*it);
      const double* c_i = &rhs_[i * d];
      auto row = out[i];
      if (elim_parent[i] < 0) {
        for (std::size_t k = 0; k < d; ++k) row[k] = c_i[k];
      } else {
        const auto parent_row = out[static_cast<std::size_t>(elim_parent[i])];
        for (std::size_t k = 0; k < d; ++k) row[k] = c_i[k] + ratio[i] * parent_row[k];
      }
    }
    return out;
  }

 private:
  struct Link {
    int bp;
    double w;
  };

  // contribution of edge (node, other) to the row of `node` if it is a BP
  void add_half(const Topology& t, const PointSet& coords, int node, int other, double w) {
    if (t.is_terminal(node)) return;
    const auto i = static_cast<std::size_t>(node - n_);
    diag_[i] += w;
    if (t.is_terminal(other)) {
      const auto x = coords[static_cast<std::size_t>(other)];
      for (std::size_t k = 0; k < static_cast<std::size_t>(dim_); ++k) rhs_[i * static_cast<std::size_t>(dim_) + k] += w * x[k];
    }
  }

  int n_;
  int m_;
  int dim_;
  std::vector<double> diag_;
  std::vector<double> rhs_;
  std::vector<std::vector<Link>> bp_adj_;
};

std::vector<double> flow_coefficients(const FlowAssignment& flows, double alpha) {
  std::vector<double> c(flows.flow.size());
  for (std::size_t e = 0; e < c.size(); ++e) c[e] = flow_weight(flows.flow[e], alpha);
  return c;
}

PointSet irls_step(const Topology& t, const PointSet& coords, const std::vector<double>& coeff, double clip,
                   double beta) {
  LeafEliminationSolver solver(t, coords, coeff, clip, beta);
  return solver.solve(coords);
}

double cost_with(const Topology& t, const PointSet& coords, const std::vector<double>& coeff, double beta) {
  double cost = 0.0;
  const auto& edges = t.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (coeff[e] == 0.0) continue;
    const double len = distance(coords[static_cast<std::size_t>(edges[e].u)], coords[static_cast<std::size_t>(edges[e].v)]);
    cost += coeff[e] * (beta == 1.0 ? len : std::pow(len, beta));
  }
  return cost;
}

// Moves single BPs onto a neighbor whenever that lowers the cost. Reweighting converges only
// sublinearly onto such collapsed optima. Returns the number of moves made.
int snap_to_neighbors(const Topology& t, PointSet& coords, const std::vector<double>& coeff, double beta) {
  const auto incident = t.incident_edges();
  const auto& edges = t.edges();
  auto local_cost = [&](int b) {
    double c = 0.0;
    for (int e : incident[static_cast<std::size_t>(b)]) {
      const auto& edge = edges[static_cast<std::size_t>(e)];
      const double len = distance(coords[static_cast<std::size_t>(edge.u)], coords[static_cast<std::size_t>(edge.v)]);
      c += coeff[static_cast<std::size_t>(e)] * (beta == 1.0 ? len : std::pow(len, beta));
    }
    return c;
  };
  int moves = 0;
  std::vector<double> saved(static_cast<std::size_t>(coords.dim()));
  for (int b = t.n_terminals(); b < t.n_nodes(); ++b) {
    auto row = coords[static_cast<std::size_t>(b)];
    double best = local_cost(b);
    for (int e : incident[static_cast<std::size_t>(b)]) {
      const auto& edge = edges[static_cast<std::size_t>(e)];
      const auto w = static_cast<std::size_t>(edge.u == b ? edge.v : edge.u);
      if (std::equal(row.begin(), row.end(), coords[w].begin())) continue;
      std::copy(row.begin(), row.end(), saved.begin());
      std::copy(coords[w].begin(), coords[w].end(), row.begin());
      const double c = local_cost(b);
      if (c < best) {
        best = c;
        ++moves;
      } else {
        std::copy(saved.begin(), saved.end(), row.begin());
      }
    }
  }
  return moves;
}

}  // namespace

PointSet irls_iteration(const Topology& t, const PointSet& coords, const FlowAssignment& flows, double alpha,
                        double clip, double beta) {
  if (static_cast<int>(coords.size()) != t.n_nodes()) throw std::invalid_argument("irls_iteration: coords must cover every node");
  return irls_step(t, coords, flow_coefficients(flows, alpha), clip, beta);
}

GeometryResult optimize_branching_points(const Topology& t, const Problem& problem, const FlowAssignment& flows,
                                         const PointSet& init_bp, const SolverConfig& config) {
  config.validate();
  if (static_cast<int>(init_bp.size()) != t.n_bps() || (t.n_bps() > 0 && init_bp.dim() != problem.dim)) {
    throw std::invalid_argument("optimize_branching_points: initial BP coordinates do not match the topology");
  }
  const auto coeff = flow_coefficients(flows, problem.alpha);
  const auto n = static_cast<std::size_t>(t.n_terminals());
  PointSet coords = problem.positions();
  coords.resize(static_cast<std::size_t>(t.n_nodes()));
  for (std::size_t b = 0; b < init_bp.size(); ++b) std::copy(init_bp[b].begin(), init_bp[b].end(), coords[n + b].begin());

  // the floor follows the problem's length scale so that scaled problems give scaled iterates
  const double diagonal = bounding_box(problem).diagonal();
  const double clip = config.clip * (diagonal > 0.0 ? diagonal : 1.0);

  GeometryResult result;
  double cost = cost_with(t, coords, coeff, config.beta);
  result.cost_trace.push_back(cost);
  if (t.n_bps() == 0) {
    result.converged = true;
  } else {
    // each snapping round restarts the reweighting; rounds are bounded by the number of BPs
    for (int round = 0; round <= t.n_bps(); ++round) {
      result.converged = false;
      while (result.iterations < config.max_iters) {
        const PointSet bps = irls_step(t, coords, coeff, clip, config.beta);
        const PointSet previous_coords = coords;
        for (std::size_t b = 0; b < bps.size(); ++b) std::copy(bps[b].begin(), bps[b].end(), coords[n + b].begin());
        const double next = cost_with(t, coords, coeff, config.beta);
        ++result.iterations;
        if (next > cost) {
          // edges shorter than the clip length can make a step overshoot by O(clip)
          coords = previous_coords;
          result.cost_trace.push_back(cost);
          result.converged = true;
          break;
        }
        result.cost_trace.push_back(next);
        const double previous = cost;
        cost = next;
        if (next <= 0.0 || (previous - next) / next <= config.eta) {
          result.converged = true;
          break;
        }
      }
      if (!config.snap || !result.converged) break;
      const PointSet before = coords;
      if (snap_to_neighbors(t, coords, coeff, config.beta) == 0) break;
      const double snapped = cost_with(t, coords, coeff, config.beta);
      if (!(snapped < cost)) {
        coords = before;
        break;
      }
      ++result.snap_rounds;
      cost = snapped;
      result.cost_trace.push_back(cost);
    }
  }
  result.cost = cost;
  result.bp_coords = PointSet(static_cast<std::size_t>(t.n_bps()), problem.dim);
  for (std::size_t b = 0; b < result.bp_coords.size(); ++b) {
    std::copy(coords[n + b].begin(), coords[n + b].end(), result.bp_coords[b].begin());
  }
  return result;
}

GeometryResult optimize_branching_points(const Topology& t, const Problem& problem, const PointSet& init_bp,
                                         const SolverConfig& config) {
  return optimize_branching_points(t, problem, compute_edge_flows(t, problem), init_bp, config);
}

GeometryResult optimize_branching_points(const Topology& t, const Problem& problem, std::uint64_t seed,
                                         const SolverConfig& config) {
  Rng rng(seed);
  return optimize_branching_points(t, problem, random_bp_coords(problem, t.n_bps(), rng), config);
}

double BpGradient::max_norm() const {
  double best = 0.0;
  for (std::size_t b = 0; b < defined.size(); ++b) {
    if (!defined[b]) continue;
    double sq = 0.0;
    for (double g : gradient[b]) sq += g * g;
    best = std::max(best, std::sqrt(sq));
  }
  return best;
}

BpGradient bp_gradient(const Topology& t, const PointSet& coords, const FlowAssignment& flows, double alpha,
                       double clip, double beta) {
  const int n = t.n_terminals();
  const auto m = static_cast<std::size_t>(t.n_bps());
  BpGradient g{PointSet(m, coords.dim()), std::vector<bool>(m, true)};
  const auto& edges = t.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const int u = edges[e].u;
    const int v = edges[e].v;
    const auto xu = coords[static_cast<std::size_t>(u)];
    const auto xv = coords[static_cast<std::size_t>(v)];
    const double len = distance(xu, xv);
    const double c = flow_weight(flows.flow[e], alpha);
    if (len <= clip) {
      if (c == 0.0) continue;
      if (!t.is_terminal(u)) g.defined[static_cast<std::size_t>(u - n)] = false;
      if (!t.is_terminal(v)) g.defined[static_cast<std::size_t>(v - n)] = false;
      continue;
    }
    // d/dx_u of c * len^beta = c * beta * len^(beta-2) * (x_u - x_v)
    const double scale = c * beta * std::pow(len, beta - 2.0);
    for (std::size_t k = 0; k < xu.size(); ++k) {
      const double diff = xu[k] - xv[k];
      if (!t.is_terminal(u)) g.gradient[static_cast<std::size_t>(u - n)][k] += scale * diff;
      if (!t.is_terminal(v)) g.gradient[static_cast<std::size_t>(v - n)][k] -= scale * diff;
    }
  }
  for (std::size_t b = 0; b < m; ++b)
    if (!g.defined[b])
      for (auto& x : g.gradient[b]) x = 0.0;
  return g;
}

}  // namespace bot

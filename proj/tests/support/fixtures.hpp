#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "bot/geometry.hpp"
#include "bot/problem.hpp"
#include "bot/topology.hpp"
#include "oracles.hpp"

namespace bot::testing {

struct TerminalSpec {
  std::vector<double> pos;
  double mu;
};

inline Problem make_problem(double alpha, std::initializer_list<TerminalSpec> terminals) {
  Problem p;
  p.alpha = alpha;
  p.dim = static_cast<int>(terminals.begin()->pos.size());
  for (const auto& t : terminals) p.terminals.push_back({t.pos, t.mu});
  return p;
}

/// Source at the origin feeding two equal sinks at (1, 1) and (1, -1).
inline Problem fermat_problem(double alpha) {
  return make_problem(alpha, {{{0.0, 0.0}, 1.0}, {{1.0, 1.0}, -0.5}, {{1.0, -1.0}, -0.5}});
}

inline oracle::EdgeList edge_list(const Topology& t) {
  oracle::EdgeList out;
  for (const auto& e : t.edges()) out.emplace_back(e.u, e.v);
  return out;
}

inline std::vector<oracle::Point> rows(const PointSet& points) {
  std::vector<oracle::Point> out;
  for (std::size_t i = 0; i < points.size(); ++i) out.emplace_back(points[i].begin(), points[i].end());
  return out;
}

inline PointSet point_set(const std::vector<oracle::Point>& points) {
  PointSet out(0, static_cast<int>(points.front().size()));
  for (const auto& p : points) out.push_back(p);
  return out;
}

/// Supplies per node: terminal masses followed by zeros for the BPs.
inline std::vector<double> node_supply(const Topology& t, const Problem& problem) {
  std::vector<double> s(static_cast<std::size_t>(t.n_nodes()), 0.0);
  for (int i = 0; i < problem.size(); ++i) s[static_cast<std::size_t>(i)] = problem.terminals[static_cast<std::size_t>(i)].mu;
  return s;
}

}  // namespace bot::testing

#include "bot/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <tuple>

#include <nlohmann/json.hpp>

#include "bot/json_io.hpp"

namespace bot {

std::vector<int> Topology::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(n_nodes()), 0);
  for (const auto& e : edges_) {
    ++deg[static_cast<std::size_t>(e.u)];
    ++deg[static_cast<std::size_t>(e.v)];
  }
  return deg;
}

std::vector<std::vector<int>> Topology::adjacency() const {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_nodes()));
  for (const auto& e : edges_) {
    adj[static_cast<std::size_t>(e.u)].push_back(e.v);
    adj[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  return adj;
}

std::vector<std::vector<int>> Topology::incident_edges() const {
  std::vector<std::vector<int>> inc(static_cast<std::size_t>(n_nodes()));
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    inc[static_cast<std::size_t>(edges_[e].u)].push_back(static_cast<int>(e));
    inc[static_cast<std::size_t>(edges_[e].v)].push_back(static_cast<int>(e));
  }
  return inc;
}

bool Topology::is_full() const {
  if (n_terminals_ < 3 || n_bps_ != n_terminals_ - 2) return false;
  const auto deg = degrees();
  for (int i = 0; i < n_nodes(); ++i) {
    if (deg[static_cast<std::size_t>(i)] != (is_terminal(i) ? 1 : 3)) return false;
  }
  return is_tree(*this);
}

std::vector<std::string> tree_violations(const Topology& t) {
  std::vector<std::string> out;
  const int nodes = t.n_nodes();
  if (t.n_terminals() < 1 || t.n_bps() < 0) {
    out.push_back("invalid node counts");
    return out;
  }
  if (static_cast<int>(t.edges().size()) != nodes - 1) {
    out.push_back("expected " + std::to_string(nodes - 1) + " edges, found " + std::to_string(t.edges().size()));
  }
  for (const auto& e : t.edges()) {
    if (e.u < 0 || e.v < 0 || e.u >= nodes || e.v >= nodes) {
      out.push_back("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") references an unknown node");
      return out;
    }
    if (e.u == e.v) {
      out.push_back("self-loop at node " + std::to_string(e.u));
      return out;
    }
  }
  // connectivity via union-find
  std::vector<int> parent(static_cast<std::size_t>(nodes));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  int components = nodes;
  for (const auto& e : t.edges()) {
    const int a = find(e.u);
    const int b = find(e.v);
    if (a == b) {
      out.push_back("cycle through edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
      return out;
    }
    parent[static_cast<std::size_t>(a)] = b;
    --components;
  }
  if (components != 1) out.push_back("graph is disconnected");
  return out;
}

bool is_tree(const Topology& t) { return tree_violations(t).empty(); }

void require_tree(const Topology& t) {
  const auto v = tree_violations(t);
  if (!v.empty()) throw InvalidTopology("invalid topology: " + v.front());
}

std::vector<double> terminal_masses(const Problem& problem) {
  std::vector<double> mu;
  mu.reserve(problem.terminals.size());
  for (const auto& t : problem.terminals) mu.push_back(t.mu);
  return mu;
}

FlowAssignment compute_edge_flows(const Topology& t, const Problem& problem) {
  const auto mu = terminal_masses(problem);
  return compute_edge_flows(t, mu);
}

FlowAssignment compute_edge_flows(const Topology& t, std::span<const double> terminal_mu) {
  if (static_cast<int>(terminal_mu.size()) != t.n_terminals()) {
    throw InvalidTopology("invalid topology: terminal count does not match the problem");
  }
  require_tree(t);
  const auto nodes = static_cast<std::size_t>(t.n_nodes());
  const auto inc = t.incident_edges();
  const auto& edges = t.edges();

  // Root at node 0, BFS order; subtree sums in reverse give the flow on each parent edge.
  std::vector<int> order;
  order.reserve(nodes);
  std::vector<int> parent_edge(nodes, -1);
  std::vector<char> seen(nodes, 0);
  order.push_back(0);
  seen[0] = 1;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const int x = order[head];
    for (int e : inc[static_cast<std::size_t>(x)]) {
      const auto& ed = edges[static_cast<std::size_t>(e)];
      const int y = ed.u == x ? ed.v : ed.u;
      if (seen[static_cast<std::size_t>(y)]) continue;
      seen[static_cast<std::size_t>(y)] = 1;
      parent_edge[static_cast<std::size_t>(y)] = e;
      order.push_back(y);
    }
  }

  std::vector<double> subtree(nodes, 0.0);
  for (std::size_t i = 0; i < terminal_mu.size(); ++i) subtree[i] = terminal_mu[i];
  FlowAssignment result;
  result.flow.assign(edges.size(), 0.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int x = *it;
    const int e = parent_edge[static_cast<std::size_t>(x)];
    if (e < 0) continue;
    const auto& ed = edges[static_cast<std::size_t>(e)];
    const int p = ed.u == x ? ed.v : ed.u;
    // the subtree of x sends its net supply towards p
    const double out_of_x = subtree[static_cast<std::size_t>(x)];
    result.flow[static_cast<std::size_t>(e)] = ed.u == x ? out_of_x : -out_of_x;
    subtree[static_cast<std::size_t>(p)] += out_of_x;
  }
  return result;
}

std::vector<double> conservation_residuals(const Topology& t, const FlowAssignment& flows,
                                           std::span<const double> terminal_mu) {
  std::vector<double> residual(static_cast<std::size_t>(t.n_nodes()), 0.0);
  for (std::size_t e = 0; e < t.edges().size(); ++e) {
    const auto& ed = t.edges()[e];
    residual[static_cast<std::size_t>(ed.u)] += flows.flow[e];
    residual[static_cast<std::size_t>(ed.v)] -= flows.flow[e];
  }
  for (std::size_t i = 0; i < terminal_mu.size(); ++i) residual[i] -= terminal_mu[i];
  return residual;
}

std::uint64_t full_topology_count(int n) {
  if (n < 3) throw std::invalid_argument("full_topology_count: n must be at least 3");
  std::uint64_t count = 1;
  for (std::uint64_t j = 3; j <= static_cast<std::uint64_t>(2 * n - 5); j += 2) count *= j;
  return count;
}

Topology full_topology_from_choices(int n, std::span<const int> choices) {
  if (n < 3) throw std::invalid_argument("full topology requires n >= 3");
  if (static_cast<int>(choices.size()) != n - 3) throw std::invalid_argument("full topology: expected n-3 choices");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(2 * n - 3));
  edges.push_back({0, n});
  edges.push_back({1, n});
  edges.push_back({2, n});
  for (int k = 3; k < n; ++k) {
    const int c = choices[static_cast<std::size_t>(k - 3)];
    if (c < 0 || c >= 2 * k - 3) throw std::invalid_argument("full topology: insertion choice out of range");
    const int bp = n + k - 2;
    const Edge split = edges[static_cast<std::size_t>(c)];
    edges[static_cast<std::size_t>(c)] = {split.u, bp};
    edges.push_back({bp, split.v});
    edges.push_back({k, bp});
  }
  return Topology(n, n - 2, std::move(edges));
}

Topology full_topology_from_index(int n, std::uint64_t index) {
  std::vector<int> choices(static_cast<std::size_t>(std::max(n - 3, 0)));
  for (int k = 3; k < n; ++k) {
    const auto radix = static_cast<std::uint64_t>(2 * k - 3);
    choices[static_cast<std::size_t>(k - 3)] = static_cast<int>(index % radix);
    index /= radix;
  }
  if (index != 0) throw std::out_of_range("full_topology_from_index: index exceeds (2n-5)!!");
  return full_topology_from_choices(n, choices);
}

Topology random_full_topology(int n, Rng& rng) {
  std::vector<int> choices(static_cast<std::size_t>(std::max(n - 3, 0)));
  for (int k = 3; k < n; ++k) {
    choices[static_cast<std::size_t>(k - 3)] = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(2 * k - 3)));
  }
  return full_topology_from_choices(n, choices);
}

FullTopologyEnumerator::FullTopologyEnumerator(int n) : n_(n) {
  if (n < 3) throw std::invalid_argument("enumerate_full_topologies: n must be at least 3");
  total_ = full_topology_count(n);
  choices_.assign(static_cast<std::size_t>(n - 3), 0);
}

std::optional<Topology> FullTopologyEnumerator::next() {
  if (done_) return std::nullopt;
  Topology t = full_topology_from_choices(n_, choices_);
  // odometer, digit k-3 has radix 2k-3
  std::size_t digit = 0;
  for (; digit < choices_.size(); ++digit) {
    const int radix = 2 * static_cast<int>(digit + 3) - 3;
    if (++choices_[digit] < radix) break;
    choices_[digit] = 0;
  }
  if (digit == choices_.size()) done_ = true;
  return t;
}

Topology star_topology(const Problem& problem) {
  const int n = problem.size();
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) edges.push_back({i, n});
  return Topology(n, 1, std::move(edges));
}

Topology mst_topology(const Problem& problem) {
  const int n = problem.size();
  struct Candidate {
    double length;
    int i;
    int j;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      candidates.push_back({distance(problem.terminals[static_cast<std::size_t>(i)].position,
                                     problem.terminals[static_cast<std::size_t>(j)].position),
                            i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.length, a.i, a.j) < std::tie(b.length, b.i, b.j);
  });
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  std::vector<Edge> edges;
  for (const auto& c : candidates) {
    const int a = find(c.i);
    const int b = find(c.j);
    if (a == b) continue;
    parent[static_cast<std::size_t>(a)] = b;
    edges.push_back({c.i, c.j});
    if (static_cast<int>(edges.size()) == n - 1) break;
  }
  return Topology(n, 0, std::move(edges));
}

std::vector<Edge> canonical_form(const Topology& t) {
  require_tree(t);
  const auto nodes = static_cast<std::size_t>(t.n_nodes());
  const auto adj = t.adjacency();

  std::vector<int> order;
  std::vector<int> parent(nodes, -1);
  order.push_back(0);
  parent[0] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const int x = order[head];
    for (int y : adj[static_cast<std::size_t>(x)]) {
      if (parent[static_cast<std::size_t>(y)] != -1) continue;
      parent[static_cast<std::size_t>(y)] = x;
      order.push_back(y);
    }
  }
  std::vector<int> min_terminal(nodes);
  for (std::size_t i = 0; i < nodes; ++i) min_terminal[i] = t.is_terminal(static_cast<int>(i)) ? static_cast<int>(i) : t.n_nodes();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (*it == 0) continue;
    auto& up = min_terminal[static_cast<std::size_t>(parent[static_cast<std::size_t>(*it)])];
    up = std::min(up, min_terminal[static_cast<std::size_t>(*it)]);
  }

  std::vector<int> relabel(nodes, -1);
  int next_bp = t.n_terminals();
  std::vector<int> queue{0};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int x = queue[head];
    relabel[static_cast<std::size_t>(x)] = t.is_terminal(x) ? x : next_bp++;
    std::vector<int> children;
    for (int y : adj[static_cast<std::size_t>(x)])
      if (y != 0 && parent[static_cast<std::size_t>(y)] == x) children.push_back(y);
    std::sort(children.begin(), children.end(), [&](int a, int b) {
      return min_terminal[static_cast<std::size_t>(a)] < min_terminal[static_cast<std::size_t>(b)];
    });
    queue.insert(queue.end(), children.begin(), children.end());
  }

  std::vector<Edge> out;
  out.reserve(t.edges().size());
  for (const auto& e : t.edges()) {
    int a = relabel[static_cast<std::size_t>(e.u)];
    int b = relabel[static_cast<std::size_t>(e.v)];
    if (a > b) std::swap(a, b);
    out.push_back({a, b});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BpCluster> detect_coupled_bps(const Topology& t, const PointSet& coords, double cluster_tol) {
  const int n = t.n_terminals();
  const int m = t.n_bps();
  std::vector<int> parent(static_cast<std::size_t>(m));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      if (distance(coords[static_cast<std::size_t>(n + a)], coords[static_cast<std::size_t>(n + b)]) <= cluster_tol) {
        parent[static_cast<std::size_t>(find(a))] = find(b);
      }
    }
  }
  std::vector<int> cluster_of_root(static_cast<std::size_t>(m), -1);
  std::vector<BpCluster> clusters;
  std::vector<int> cluster_of_bp(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) {
    const int r = find(a);
    if (cluster_of_root[static_cast<std::size_t>(r)] < 0) {
      cluster_of_root[static_cast<std::size_t>(r)] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    const int c = cluster_of_root[static_cast<std::size_t>(r)];
    cluster_of_bp[static_cast<std::size_t>(a)] = c;
    clusters[static_cast<std::size_t>(c)].bps.push_back(n + a);
  }
  const auto adj = t.adjacency();
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    auto& cl = clusters[c];
    for (int bp : cl.bps) {
      for (int y : adj[static_cast<std::size_t>(bp)]) {
        const bool inside = !t.is_terminal(y) && cluster_of_bp[static_cast<std::size_t>(y - n)] == static_cast<int>(c);
        if (!inside) cl.effective_neighbors.push_back(y);
      }
    }
    std::sort(cl.effective_neighbors.begin(), cl.effective_neighbors.end());
    cl.effective_neighbors.erase(std::unique(cl.effective_neighbors.begin(), cl.effective_neighbors.end()),
                                 cl.effective_neighbors.end());
    cl.effective_degree = static_cast<int>(cl.effective_neighbors.size());
    for (int i = 0; i < n && cl.coincident_terminal < 0; ++i) {
      for (int bp : cl.bps) {
        if (distance(coords[static_cast<std::size_t>(i)], coords[static_cast<std::size_t>(bp)]) <= cluster_tol) {
          cl.coincident_terminal = i;
          break;
        }
      }
    }
  }
  return clusters;
}

nlohmann::json to_json(const Topology& t) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : t.edges()) edges.push_back({e.u, e.v});
  return {{"n_terminals", t.n_terminals()}, {"n_bps", t.n_bps()}, {"edges", std::move(edges)}};
}

Topology topology_from_json(const nlohmann::json& j) {
  try {
    std::vector<Edge> edges;
    for (const auto& je : j.at("edges")) {
      if (!je.is_array() || je.size() != 2) throw ParseError("topology: each edge must be a pair of node ids");
      edges.push_back({je.at(0).get<int>(), je.at(1).get<int>()});
    }
    Topology t(j.at("n_terminals").get<int>(), j.at("n_bps").get<int>(), std::move(edges));
    const auto v = tree_violations(t);
    if (!v.empty()) throw ParseError("topology: " + v.front());
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("topology: ") + e.what());
  }
}

}  // namespace bot

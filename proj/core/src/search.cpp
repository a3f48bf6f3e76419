#include "bot/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bot/json_io.hpp"
#include "bot/parallel.hpp"

namespace bot {

const char* to_string(InitialTopology init) {
  switch (init) {
    case InitialTopology::Star: return "star";
    case InitialTopology::Mst: return "mst";
    case InitialTopology::Given: return "given";
  }
  return "?";
}

InitialTopology initial_topology_from_string(const std::string& name) {
  if (name == "star") return InitialTopology::Star;
  if (name == "mst") return InitialTopology::Mst;
  if (name == "given") return InitialTopology::Given;
  throw std::invalid_argument("unknown initial topology '" + name + "' (expected star, mst or given)");
}

void HeuristicConfig::validate() const {
  if (!(omega > 0.0)) throw std::invalid_argument("HeuristicConfig: omega must be positive");
  if (!(min_improvement >= 0.0 && min_improvement < 1.0))
    throw std::invalid_argument("HeuristicConfig: min_improvement must lie in [0, 1)");
  geometry.validate();
  if (init == InitialTopology::Given && !given) throw std::invalid_argument("HeuristicConfig: init=given without a topology");
}

double edge_node_distance(std::span<const double> xi, std::span<const double> xj, std::span<const double> point) {
  double seg_sq = 0.0;
  double proj = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const double d = xj[k] - xi[k];
    seg_sq += d * d;
    proj += (point[k] - xi[k]) * d;
  }
  const double lambda = seg_sq > 0.0 ? std::clamp(proj / seg_sq, 0.0, 1.0) : 0.0;
  double dist_sq = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const double diff = xi[k] + lambda * (xj[k] - xi[k]) - point[k];
    dist_sq += diff * diff;
  }
  return std::sqrt(dist_sq);
}

std::vector<double> kernel_probabilities(std::span<const double> distances, double omega) {
  if (distances.empty()) return {};
  if (!(omega > 0.0)) throw std::invalid_argument("kernel_probabilities: omega must be positive");
  const double d_min = *std::min_element(distances.begin(), distances.end());
  std::vector<double> p(distances.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (d_min == 0.0) {
      p[i] = distances[i] == 0.0 ? 1.0 : 0.0;
    } else {
      // shifted by the nearest edge so that the largest weight is exactly representable
      const double width = omega * d_min;
      p[i] = std::exp(-(distances[i] * distances[i] - d_min * d_min) / (width * width));
    }
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

SearchState make_state(const Problem& problem, Topology t, const PointSet& init_bp, const SolverConfig& config) {
  SearchState s;
  s.flows = compute_edge_flows(t, problem);
  auto geo = optimize_branching_points(t, problem, s.flows, init_bp, config);
  s.topology = std::move(t);
  s.bp_coords = std::move(geo.bp_coords);
  s.cost = geo.cost;
  s.geometry_iterations = geo.iterations;
  s.geometry_converged = geo.converged;
  return s;
}

namespace {

std::size_t sample_index(const std::vector<double>& probabilities, Rng& rng) {
  const double r = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    acc += probabilities[i];
    if (r < acc) return i;
  }
  // rounding left r above the final partial sum: last edge with positive mass
  for (std::size_t i = probabilities.size(); i-- > 0;)
    if (probabilities[i] > 0.0) return i;
  return probabilities.size() - 1;
}

}  // namespace

StepOutcome greedy_step(const Problem& problem, const SearchState& state, int removed, const HeuristicConfig& config,
                        Rng& rng) {
  const Topology& t = state.topology;
  const int n = t.n_terminals();
  const int nodes = t.n_nodes();
  const auto& edges = t.edges();
  if (removed < 0 || removed >= static_cast<int>(edges.size())) throw std::out_of_range("greedy_step: edge index out of range");
  const Edge cut = edges[static_cast<std::size_t>(removed)];

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(nodes));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (static_cast<int>(e) == removed) continue;
    adj[static_cast<std::size_t>(edges[e].u)].push_back(edges[e].v);
    adj[static_cast<std::size_t>(edges[e].v)].push_back(edges[e].u);
  }
  std::vector<char> on_u_side(static_cast<std::size_t>(nodes), 0);
  std::vector<int> stack{cut.u};
  on_u_side[static_cast<std::size_t>(cut.u)] = 1;
  int size_u = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++size_u;
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (!on_u_side[static_cast<std::size_t>(w)]) {
        on_u_side[static_cast<std::size_t>(w)] = 1;
        stack.push_back(w);
      }
    }
  }
  const int size_v = nodes - size_u;
  int ell = 0;
  if (size_u != size_v)
    ell = size_u < size_v ? cut.u : cut.v;
  else
    ell = std::min(cut.u, cut.v);
  const int anchor = ell == cut.u ? cut.v : cut.u;
  const bool ell_on_u = on_u_side[static_cast<std::size_t>(ell)] != 0;
  auto in_larger = [&](int v) { return (on_u_side[static_cast<std::size_t>(v)] != 0) != ell_on_u; };

  std::vector<Edge> kept;
  kept.reserve(edges.size() + 2);
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (static_cast<int>(e) != removed) kept.push_back(edges[e]);

  int deleted_bp = -1;
  if (!t.is_terminal(anchor) && adj[static_cast<std::size_t>(anchor)].size() == 2) {
    const int a = adj[static_cast<std::size_t>(anchor)][0];
    const int b = adj[static_cast<std::size_t>(anchor)][1];
    std::erase_if(kept, [&](const Edge& e) { return e.u == anchor || e.v == anchor; });
    kept.push_back({a, b});
    deleted_bp = anchor;
  }
  // The merged edge is not a reconnection target; splicing onto it would rebuild the current tree.
  const std::size_t merged = deleted_bp >= 0 ? kept.size() - 1 : kept.size();

  std::vector<std::size_t> candidates;
  for (std::size_t e = 0; e < kept.size(); ++e)
    if (e != merged && in_larger(kept[e].u) && in_larger(kept[e].v)) candidates.push_back(e);
  if (candidates.empty()) return {};

  const PointSet coords = assemble_coords(problem, state.bp_coords);
  std::vector<double> dist(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const Edge& e = kept[candidates[c]];
    dist[c] = edge_node_distance(coords[static_cast<std::size_t>(e.u)], coords[static_cast<std::size_t>(e.v)],
                                 coords[static_cast<std::size_t>(ell)]);
  }
  const std::size_t target = candidates[sample_index(kernel_probabilities(dist, config.omega), rng)];

  // compact BP ids after the deletion; the new BP takes the last id
  std::vector<int> remap(static_cast<std::size_t>(nodes));
  int next_bp = n;
  for (int v = 0; v < nodes; ++v) {
    if (t.is_terminal(v))
      remap[static_cast<std::size_t>(v)] = v;
    else
      remap[static_cast<std::size_t>(v)] = v == deleted_bp ? -1 : next_bp++;
  }
  const int new_bp = next_bp;
  const int n_bps = new_bp - n + 1;

  std::vector<Edge> out;
  out.reserve(kept.size() + 2);
  for (std::size_t e = 0; e < kept.size(); ++e) {
    const int u = remap[static_cast<std::size_t>(kept[e].u)];
    const int v = remap[static_cast<std::size_t>(kept[e].v)];
    if (e == target) {
      out.push_back({u, new_bp});
      out.push_back({new_bp, v});
    } else {
      out.push_back({u, v});
    }
  }
  out.push_back({remap[static_cast<std::size_t>(ell)], new_bp});

  PointSet init(static_cast<std::size_t>(n_bps), problem.dim);
  for (int v = n; v < nodes; ++v) {
    const int r = remap[static_cast<std::size_t>(v)];
    if (r < 0) continue;
    const auto src = state.bp_coords[static_cast<std::size_t>(v - n)];
    std::copy(src.begin(), src.end(), init[static_cast<std::size_t>(r - n)].begin());
  }
  const PointSet fresh = random_bp_coords(problem, 1, rng);
  std::copy(fresh[0].begin(), fresh[0].end(), init[static_cast<std::size_t>(new_bp - n)].begin());

  StepOutcome outcome;
  outcome.candidate = make_state(problem, Topology(n, n_bps, std::move(out)), init, config.geometry);
  outcome.accepted = outcome.candidate->cost < state.cost * (1.0 - config.min_improvement);
  return outcome;
}

StepOutcome greedy_step(const Problem& problem, const SearchState& state, const HeuristicConfig& config, Rng& rng) {
  const auto count = state.topology.edges().size();
  if (count == 0) return {};
  return greedy_step(problem, state, static_cast<int>(uniform_index(rng, count)), config, rng);
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Solution to_solution(const Problem& problem, const SearchState& state) {
  Solution s;
  s.problem = problem;
  s.topology = state.topology;
  s.bp_coords = state.bp_coords;
  s.flows = state.flows;
  s.cost = state.cost;
  s.meta.alpha = problem.alpha;
  s.meta.geometry_converged = state.geometry_converged;
  return s;
}

}  // namespace

Solution greedy_heuristic(const Problem& problem, const HeuristicConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  require_valid(problem);
  config.validate();
  Rng rng(config.seed);

  Topology initial;
  if (problem.size() == 2) {
    initial = Topology(2, 0, {{0, 1}});
  } else {
    switch (config.init) {
      case InitialTopology::Star: initial = star_topology(problem); break;
      case InitialTopology::Mst: initial = mst_topology(problem); break;
      case InitialTopology::Given:
        initial = *config.given;
        if (initial.n_terminals() != problem.size()) throw std::invalid_argument("greedy_heuristic: given topology does not match problem");
        require_tree(initial);
        break;
    }
  }
  SearchState state = make_state(problem, initial, random_bp_coords(problem, initial.n_bps(), rng), config.geometry);
  int tried = 0;
  int accepted = 0;
  int geometry_iterations = state.geometry_iterations;

  while (problem.size() > 2) {
    std::vector<int> untried(state.topology.edges().size());
    for (std::size_t e = 0; e < untried.size(); ++e) untried[e] = static_cast<int>(e);
    bool moved = false;
    while (!untried.empty()) {
      const auto pick = static_cast<std::size_t>(uniform_index(rng, untried.size()));
      const int edge = untried[pick];
      untried[pick] = untried.back();
      untried.pop_back();
      auto outcome = greedy_step(problem, state, edge, config, rng);
      ++tried;
      if (!outcome.candidate) continue;
      geometry_iterations += outcome.candidate->geometry_iterations;
      if (outcome.accepted) {
        state = std::move(*outcome.candidate);
        ++accepted;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }

  Solution s = to_solution(problem, state);
  s.meta.method = std::string("heuristic/") + to_string(config.init);
  s.meta.seed = config.seed;
  s.meta.iterations_tried = tried;
  s.meta.iterations_accepted = accepted;
  s.meta.topologies_evaluated = static_cast<std::uint64_t>(tried) + 1;
  s.meta.geometry_iterations = geometry_iterations;
  s.meta.wall_seconds = seconds_since(start);
  return s;
}

Solution brute_force(const Problem& problem, const BruteForceConfig& config, std::vector<double>* per_topology_costs) {
  const auto start = std::chrono::steady_clock::now();
  require_valid(problem);
  config.geometry.validate();
  const int n = problem.size();
  if (n < 3) throw std::invalid_argument("brute_force: at least 3 terminals required");
  if (n > config.cap)
    throw std::invalid_argument("brute_force: " + std::to_string(n) + " terminals exceed the cap of " + std::to_string(config.cap));

  const std::uint64_t total = full_topology_count(n);
  const auto masses = terminal_masses(problem);
  auto evaluate = [&](std::uint64_t index) {
    Topology t = full_topology_from_index(n, index);
    Rng rng(derive_seed(config.seed, index));
    const auto init = random_bp_coords(problem, t.n_bps(), rng);
    SearchState s;
    s.flows = compute_edge_flows(t, masses);
    auto geo = optimize_branching_points(t, problem, s.flows, init, config.geometry);
    s.topology = std::move(t);
    s.bp_coords = std::move(geo.bp_coords);
    s.cost = geo.cost;
    s.geometry_iterations = geo.iterations;
    s.geometry_converged = geo.converged;
    return s;
  };

  std::vector<double> costs(static_cast<std::size_t>(total));
  std::vector<int> iterations(static_cast<std::size_t>(total));
  parallel_for(static_cast<std::size_t>(total), [&](std::size_t i) {
    const auto s = evaluate(i);
    costs[i] = s.cost;
    iterations[i] = s.geometry_iterations;
  }, config.workers);

  std::size_t best = 0;
  for (std::size_t i = 1; i < costs.size(); ++i)
    if (costs[i] < costs[best]) best = i;
  long long geometry_iterations = 0;
  for (int it : iterations) geometry_iterations += it;

  Solution s = to_solution(problem, evaluate(best));
  s.meta.method = "brute-force";
  s.meta.seed = config.seed;
  s.meta.topologies_evaluated = total;
  s.meta.geometry_iterations = static_cast<int>(std::min<long long>(geometry_iterations, std::numeric_limits<int>::max()));
  s.meta.wall_seconds = seconds_since(start);
  if (per_topology_costs) *per_topology_costs = std::move(costs);
  return s;
}

nlohmann::json to_json(const Solution& solution) {
  nlohmann::json bps = nlohmann::json::array();
  for (std::size_t b = 0; b < solution.bp_coords.size(); ++b) {
    const auto row = solution.bp_coords[b];
    bps.push_back(std::vector<double>(row.begin(), row.end()));
  }
  const auto& m = solution.meta;
  return {{"problem", to_json(solution.problem)},
          {"topology", to_json(solution.topology)},
          {"bp_coords", bps},
          {"flows", solution.flows.flow},
          {"cost", solution.cost},
          {"meta",
           {{"method", m.method},
            {"seed", m.seed},
            {"alpha", m.alpha},
            {"iterations_tried", m.iterations_tried},
            {"iterations_accepted", m.iterations_accepted},
            {"topologies_evaluated", m.topologies_evaluated},
            {"geometry_iterations", m.geometry_iterations},
            {"geometry_converged", m.geometry_converged},
            {"wall_seconds", m.wall_seconds}}}};
}

Solution solution_from_json(const nlohmann::json& j) {
  try {
    Solution s;
    s.problem = problem_from_json(j.at("problem"));
    s.topology = topology_from_json(j.at("topology"));
    if (s.topology.n_terminals() != s.problem.size()) throw ParseError("solution: topology does not match problem");
    const auto& bps = j.at("bp_coords");
    if (!bps.is_array() || static_cast<int>(bps.size()) != s.topology.n_bps())
      throw ParseError("solution: bp_coords must hold one point per BP");
    s.bp_coords = PointSet(bps.size(), s.problem.dim);
    for (std::size_t b = 0; b < bps.size(); ++b) {
      const auto row = bps[b].get<std::vector<double>>();
      if (static_cast<int>(row.size()) != s.problem.dim) throw ParseError("solution: BP " + std::to_string(b) + " has wrong dimension");
      std::copy(row.begin(), row.end(), s.bp_coords[b].begin());
    }
    s.flows.flow = j.at("flows").get<std::vector<double>>();
    if (s.flows.flow.size() != s.topology.edges().size()) throw ParseError("solution: one flow per edge required");
    s.cost = j.at("cost").get<double>();
    if (j.contains("meta")) {
      const auto& m = j.at("meta");
      s.meta.method = m.value("method", "");
      s.meta.seed = m.value("seed", std::uint64_t{0});
      s.meta.alpha = m.value("alpha", s.problem.alpha);
      s.meta.iterations_tried = m.value("iterations_tried", 0);
      s.meta.iterations_accepted = m.value("iterations_accepted", 0);
      s.meta.topologies_evaluated = m.value("topologies_evaluated", std::uint64_t{0});
      s.meta.geometry_iterations = m.value("geometry_iterations", 0);
      s.meta.geometry_converged = m.value("geometry_converged", true);
      s.meta.wall_seconds = m.value("wall_seconds", 0.0);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("solution: ") + e.what());
  }
}

Solution load_solution(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  try {
    return solution_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_solution(const Solution& solution, const std::filesystem::path& path) { write_json_file(to_json(solution), path); }

}  // namespace bot

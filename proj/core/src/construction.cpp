#include "bot/construction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bot/geometry.hpp"
#include "bot/parallel.hpp"

namespace bot {

namespace {

constexpr double kTangentTolerance = 1e-12;

Vec2 sub(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
Vec2 add(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
Vec2 scale(const Vec2& a, double s) { return {a[0] * s, a[1] * s}; }
double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }
double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }

Vec2 to_vec2(std::span<const double> p) { return {p[0], p[1]}; }

struct Circle {
  Vec2 pivot{};
  Vec2 center{};
  double radius = 0.0;
};

// Triangle a1 a2 p with angle `angle2` at a1 and `angle1` at a2, p on side `side` of a1 -> a2.
std::optional<Circle> pivot_circle(const Vec2& a1, const Vec2& a2, double angle1, double angle2, int side) {
  const Vec2 chord = sub(a2, a1);
  const double len = norm(chord);
  const double total = angle1 + angle2;
  const double s = std::sin(total);
  if (len == 0.0 || !(total > 0.0) || !(total < std::numbers::pi) || s <= kTangentTolerance) return std::nullopt;
  const Vec2 u = scale(chord, 1.0 / len);
  const Vec2 n{-u[1] * side, u[0] * side};
  const double len1 = len * std::sin(angle1) / s;
  Circle c;
  c.pivot = add(a1, add(scale(u, len1 * std::cos(angle2)), scale(n, len1 * std::sin(angle2))));
  c.radius = len / (2.0 * s);
  // the inscribed angle at the pivot is pi - total; the center sits on the pivot side iff it is acute
  const double offset = 0.5 * len * std::cos(std::numbers::pi - total) / s;
  c.center = add(scale(add(a1, a2), 0.5), scale(n, offset));
  return c;
}

struct Placement {
  Vec2 point{};
  bool valid = false;
  bool tangent = false;
};

// Second intersection of the line q -> pivot with the circle, kept if it lies between the two
// points and on the arc opposite the pivot.
Placement place_on_arc(const Vec2& q, const Circle& c, const Vec2& a1, const Vec2& a2, int side) {
  Placement out;
  const Vec2 d = sub(q, c.pivot);
  const double dd = dot(d, d);
  if (dd == 0.0) return out;
  const double t = -2.0 * dot(d, sub(c.pivot, c.center)) / dd;
  out.point = add(c.pivot, scale(d, t));
  const Vec2 chord = sub(a2, a1);
  const double scale_len = std::max({norm(chord), std::sqrt(dd), 1.0});
  const double signed_offset = side * cross(chord, sub(out.point, a1)) / norm(chord);
  const bool t_ok = t > kTangentTolerance && t <= 1.0 + kTangentTolerance;
  const bool side_ok = signed_offset <= kTangentTolerance * scale_len;
  out.valid = t_ok && side_ok;
  out.tangent = std::abs(t - 1.0) <= 1e-9 || std::abs(signed_offset) <= 1e-9 * scale_len;
  if (t > 1.0 && out.valid) out.point = q;
  return out;
}

}  // namespace

SingleBranching optimal_bp_single(const Vec2& a0, const Vec2& a1, const Vec2& a2, double m1, double m2, double alpha,
                                  BranchingMode mode) {
  SingleBranching out;
  out.branching = classify_branching(a0, a1, a2, m1, m2, alpha, mode);
  switch (out.branching.kind) {
    case BranchingKind::V: out.bp = a0; return out;
    case BranchingKind::L1: out.bp = a1; return out;
    case BranchingKind::L2: out.bp = a2; return out;
    case BranchingKind::Y: break;
  }
  const int side = cross(sub(a2, a1), sub(a0, a1)) > 0.0 ? -1 : 1;
  const auto circle = pivot_circle(a1, a2, out.branching.angle1, out.branching.angle2, side);
  if (!circle) {
    out.bp = a0;
    out.branching.transient = true;
    return out;
  }
  const auto placed = place_on_arc(a0, *circle, a1, a2, side);
  if (placed.valid) {
    out.bp = placed.point;
    out.branching.transient = out.branching.transient || placed.tangent;
    return out;
  }
  // nearest of the admissible boundary points
  out.branching.transient = true;
  out.bp = a0;
  double best = norm(sub(placed.point, a0));
  for (const Vec2& end : {a1, a2}) {
    const double d = norm(sub(placed.point, end));
    if (d < best) {
      best = d;
      out.bp = end;
    }
  }
  return out;
}

ConstructionResult construct_ros(const Topology& t, const Problem& problem, int root, const std::vector<int>& side_choices) {
  if (problem.dim != 2) throw std::invalid_argument("construct_ros: only 2D problems are supported");
  if (t.n_terminals() != problem.size()) throw std::invalid_argument("construct_ros: topology does not match problem");
  if (!t.is_full() || t.n_terminals() < 3) throw std::invalid_argument("construct_ros: topology must be a full tree topology");
  const int n = t.n_terminals();
  const int m = t.n_bps();
  if (static_cast<int>(side_choices.size()) != m) throw std::invalid_argument("construct_ros: one side choice per BP required");
  if (root < 0 || root >= n) throw std::invalid_argument("construct_ros: root must be a terminal");
  for (int s : side_choices)
    if (s != 1 && s != -1) throw std::invalid_argument("construct_ros: side choices must be +1 or -1");

  ConstructionResult result;
  result.root = root;
  result.side_choices = side_choices;
  result.classes.assign(static_cast<std::size_t>(m), BranchingKind::Y);
  result.pivots.resize(static_cast<std::size_t>(m));
  result.bp_coords = PointSet(static_cast<std::size_t>(m), 2);

  const auto flows = compute_edge_flows(t, problem);
  const auto& edges = t.edges();
  auto adjacency = t.adjacency();
  auto incident = t.incident_edges();
  for (int v = 0; v < t.n_nodes(); ++v) {
    auto& nbrs = adjacency[static_cast<std::size_t>(v)];
    auto& inc = incident[static_cast<std::size_t>(v)];
    std::vector<std::size_t> idx(nbrs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return nbrs[a] < nbrs[b]; });
    std::vector<int> sorted_nbrs, sorted_inc;
    for (auto i : idx) {
      sorted_nbrs.push_back(nbrs[i]);
      sorted_inc.push_back(inc[i]);
    }
    nbrs = std::move(sorted_nbrs);
    inc = std::move(sorted_inc);
  }

  // BFS from the root; ties by ascending node id
  std::vector<int> parent(static_cast<std::size_t>(t.n_nodes()), -1);
  std::vector<int> parent_edge(static_cast<std::size_t>(t.n_nodes()), -1);
  std::vector<int> order{root};
  std::vector<char> seen(static_cast<std::size_t>(t.n_nodes()), 0);
  seen[static_cast<std::size_t>(root)] = 1;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const auto v = static_cast<std::size_t>(order[head]);
    for (std::size_t k = 0; k < adjacency[v].size(); ++k) {
      const int w = adjacency[v][k];
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = 1;
      parent[static_cast<std::size_t>(w)] = static_cast<int>(v);
      parent_edge[static_cast<std::size_t>(w)] = incident[v][k];
      order.push_back(w);
    }
  }

  // signed flow from `child` into its parent
  auto inflow = [&](int child) {
    const auto e = static_cast<std::size_t>(parent_edge[static_cast<std::size_t>(child)]);
    return edges[e].u == child ? flows.flow[e] : -flows.flow[e];
  };

  std::vector<Vec2> rep(static_cast<std::size_t>(t.n_nodes()));
  for (int i = 0; i < n; ++i) rep[static_cast<std::size_t>(i)] = to_vec2(problem.terminals[static_cast<std::size_t>(i)].position);

  auto fail = [&](std::string why) {
    result.success = false;
    result.failure = std::move(why);
    return result;
  };

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int b = *it;
    if (t.is_terminal(b)) continue;
    std::array<int, 2> kids{};
    int found = 0;
    for (int w : adjacency[static_cast<std::size_t>(b)])
      if (w != parent[static_cast<std::size_t>(b)]) kids[static_cast<std::size_t>(found++)] = w;
    const double in1 = inflow(kids[0]);
    const double in2 = inflow(kids[1]);
    const std::string label = "BP " + std::to_string(b);
    if (in1 == 0.0 || in2 == 0.0) return fail(label + ": child edge carries no flow");
    const auto mode = (in1 > 0.0) == (in2 > 0.0) ? BranchingMode::Symmetric : BranchingMode::Asymmetric;
    ChildAngles angles;
    try {
      angles = child_angles(problem.alpha, std::abs(in1), std::abs(in2), mode);
    } catch (const std::exception& e) {
      return fail(label + ": " + e.what());
    }
    if (angles.degenerate) return fail(label + ": parent edge carries no flow");
    const int side = side_choices[static_cast<std::size_t>(b - n)];
    const Vec2 a1 = rep[static_cast<std::size_t>(kids[0])];
    const Vec2 a2 = rep[static_cast<std::size_t>(kids[1])];
    const auto circle = pivot_circle(a1, a2, angles.first, angles.second, side);
    if (!circle) return fail(label + ": degenerate pivot circle");
    auto& rec = result.pivots[static_cast<std::size_t>(b - n)];
    rec.bp = b;
    rec.pivot = circle->pivot;
    rec.center = circle->center;
    rec.radius = circle->radius;
    rec.side = side;
    rec.child_pair = kids;
    rec.child_points = {a1, a2};
    rec.angle1 = angles.first;
    rec.angle2 = angles.second;
    rec.mode = mode;
    rep[static_cast<std::size_t>(b)] = circle->pivot;
  }

  std::vector<Vec2> pos(rep);
  for (int b : order) {
    if (t.is_terminal(b)) continue;
    const auto& rec = result.pivots[static_cast<std::size_t>(b - n)];
    const Circle circle{rec.pivot, rec.center, rec.radius};
    const auto placed = place_on_arc(pos[static_cast<std::size_t>(parent[static_cast<std::size_t>(b)])], circle,
                                     rec.child_points[0], rec.child_points[1], rec.side);
    if (!placed.valid) return fail("BP " + std::to_string(b) + ": segment misses the pivot arc");
    pos[static_cast<std::size_t>(b)] = placed.point;
    auto row = result.bp_coords[static_cast<std::size_t>(b - n)];
    row[0] = placed.point[0];
    row[1] = placed.point[1];
  }

  result.success = true;
  result.cost = bot_cost(t, assemble_coords(problem, result.bp_coords), flows, problem.alpha);
  return result;
}

ExhaustiveConstruction construct_ros_exhaustive(const Topology& t, const Problem& problem, int root, int cap) {
  const int n = t.n_terminals();
  if (n > cap) throw std::invalid_argument("construct_ros_exhaustive: " + std::to_string(n) + " terminals exceed the cap of " + std::to_string(cap));
  if (n < 3) throw std::invalid_argument("construct_ros_exhaustive: at least 3 terminals required");
  const auto combos = std::size_t{1} << static_cast<unsigned>(n - 2);
  std::vector<ConstructionResult> results(combos);
  parallel_for(combos, [&](std::size_t mask) {
    std::vector<int> sides(static_cast<std::size_t>(n - 2));
    for (std::size_t b = 0; b < sides.size(); ++b) sides[b] = (mask >> b) & 1U ? -1 : 1;
    results[mask] = construct_ros(t, problem, root, sides);
  });

  ExhaustiveConstruction out;
  out.combinations_tried = static_cast<int>(combos);
  int best = -1;
  for (std::size_t i = 0; i < combos; ++i) {
    if (!results[i].success) continue;
    ++out.successes;
    if (best < 0 || results[i].cost < results[static_cast<std::size_t>(best)].cost) best = static_cast<int>(i);
  }
  out.best = std::move(results[best >= 0 ? static_cast<std::size_t>(best) : combos - 1]);
  return out;
}

nlohmann::json to_json(const ConstructionResult& result) {
  auto vec = [](const Vec2& v) { return nlohmann::json::array({v[0], v[1]}); };
  nlohmann::json pivots = nlohmann::json::array();
  for (const auto& p : result.pivots) {
    pivots.push_back({{"bp", p.bp},
                      {"pivot", vec(p.pivot)},
                      {"center", vec(p.center)},
                      {"radius", p.radius},
                      {"side", p.side},
                      {"children", {p.child_pair[0], p.child_pair[1]}},
                      {"angles", {p.angle1, p.angle2}},
                      {"mode", p.mode == BranchingMode::Symmetric ? "symmetric" : "asymmetric"}});
  }
  nlohmann::json bps = nlohmann::json::array();
  if (result.success)
    for (std::size_t b = 0; b < result.bp_coords.size(); ++b) bps.push_back({result.bp_coords[b][0], result.bp_coords[b][1]});
  nlohmann::json classes = nlohmann::json::array();
  for (auto k : result.classes) classes.push_back(to_string(k));
  nlohmann::json j = {{"success", result.success}, {"root", result.root},   {"side_choices", result.side_choices},
                      {"pivots", pivots},          {"bp_coords", bps},      {"classes", classes}};
  if (result.success)
    j["cost"] = result.cost;
  else
    j["failure"] = result.failure;
  return j;
}

}  // namespace bot

#include "bot/problem.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bot/json_io.hpp"
#include "bot/random.hpp"

namespace bot {

PointSet Problem::positions() const {
  PointSet points(terminals.size(), dim);
  for (std::size_t i = 0; i < terminals.size(); ++i) {
    const auto& pos = terminals[i].position;
    for (int k = 0; k < dim && k < static_cast<int>(pos.size()); ++k) points[i][static_cast<std::size_t>(k)] = pos[static_cast<std::size_t>(k)];
  }
  return points;
}

std::vector<std::string> validate(const Problem& problem) {
  std::vector<std::string> violations;
  auto report = [&](const std::string& msg) { violations.push_back(msg); };

  if (!(problem.alpha >= 0.0 && problem.alpha <= 1.0)) {
    std::ostringstream msg;
    msg << "alpha out of range: " << problem.alpha << " not in [0,1]";
    report(msg.str());
  }
  if (problem.dim < 2) report("dimension must be at least 2, got " + std::to_string(problem.dim));

  double total = 0.0;
  bool has_source = false;
  bool has_sink = false;
  bool shapes_ok = true;
  for (std::size_t i = 0; i < problem.terminals.size(); ++i) {
    const auto& t = problem.terminals[i];
    if (static_cast<int>(t.position.size()) != problem.dim) {
      report("terminal " + std::to_string(i) + ": position has length " + std::to_string(t.position.size()) +
             ", expected " + std::to_string(problem.dim));
      shapes_ok = false;
    }
    for (double c : t.position) {
      if (!std::isfinite(c)) {
        report("terminal " + std::to_string(i) + ": non-finite coordinate");
        shapes_ok = false;
        break;
      }
    }
    if (!std::isfinite(t.mu)) {
      report("terminal " + std::to_string(i) + ": non-finite mass");
      continue;
    }
    if (t.mu == 0.0) report("terminal " + std::to_string(i) + ": zero mass");
    has_source = has_source || t.mu > 0.0;
    has_sink = has_sink || t.mu < 0.0;
    total += t.mu;
  }
  if (std::abs(total) > kMassBalanceTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "mass imbalance: total mu = " << total;
    report(msg.str());
  }
  if (!has_source) report("no source terminal (mu > 0)");
  if (!has_sink) report("no sink terminal (mu < 0)");

  if (shapes_ok) {
    for (std::size_t i = 0; i < problem.terminals.size(); ++i) {
      for (std::size_t j = i + 1; j < problem.terminals.size(); ++j) {
        if (problem.terminals[i].position == problem.terminals[j].position) {
          report("coincident terminals " + std::to_string(i) + " and " + std::to_string(j));
        }
      }
    }
  }
  return violations;
}

void require_valid(const Problem& problem) {
  const auto violations = validate(problem);
  if (violations.empty()) return;
  std::string msg = "invalid problem:";
  for (const auto& v : violations) msg += " " + v + ";";
  throw std::invalid_argument(msg);
}

Problem generate_random_problem(int n, std::uint64_t seed, int dim) {
  if (n < 2) throw std::invalid_argument("generate_random_problem: n must be at least 2");
  if (dim < 2) throw std::invalid_argument("generate_random_problem: dim must be at least 2");
  Rng rng(seed);
  Problem problem;
  problem.dim = dim;
  problem.alpha = uniform01(rng);
  const int n_sources = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n - 1)));
  const int n_sinks = n - n_sources;

  // masses in (0,1] so no terminal ends up massless
  std::vector<double> supply(static_cast<std::size_t>(n_sources));
  std::vector<double> demand(static_cast<std::size_t>(n_sinks));
  double supply_total = 0.0;
  double demand_total = 0.0;
  for (auto& s : supply) supply_total += (s = uniform_open_closed(rng));
  for (auto& d : demand) demand_total += (d = uniform_open_closed(rng));

  problem.terminals.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& t = problem.terminals[static_cast<std::size_t>(i)];
    t.position.resize(static_cast<std::size_t>(dim));
    for (auto& c : t.position) c = uniform01(rng);
    t.mu = i < n_sources ? supply[static_cast<std::size_t>(i)] / supply_total
                         : -demand[static_cast<std::size_t>(i - n_sources)] / demand_total;
  }
  return problem;
}

Problem scale_coordinates(const Problem& problem, double factor) {
  Problem out = problem;
  for (auto& t : out.terminals)
    for (auto& c : t.position) c *= factor;
  return out;
}

Problem scale_masses(const Problem& problem, double factor) {
  Problem out = problem;
  for (auto& t : out.terminals) t.mu *= factor;
  return out;
}

double BoundingBox::diagonal() const {
  double sq = 0.0;
  for (std::size_t k = 0; k < lo.size(); ++k) sq += (hi[k] - lo[k]) * (hi[k] - lo[k]);
  return std::sqrt(sq);
}

BoundingBox bounding_box(const Problem& problem) {
  BoundingBox box;
  const auto d = static_cast<std::size_t>(problem.dim);
  box.lo.assign(d, std::numeric_limits<double>::infinity());
  box.hi.assign(d, -std::numeric_limits<double>::infinity());
  for (const auto& t : problem.terminals) {
    for (std::size_t k = 0; k < d; ++k) {
      box.lo[k] = std::min(box.lo[k], t.position[k]);
      box.hi[k] = std::max(box.hi[k], t.position[k]);
    }
  }
  return box;
}

nlohmann::json to_json(const Problem& problem) {
  nlohmann::json terminals = nlohmann::json::array();
  for (const auto& t : problem.terminals) terminals.push_back({{"pos", t.position}, {"mu", t.mu}});
  return {{"alpha", problem.alpha}, {"dim", problem.dim}, {"terminals", std::move(terminals)}};
}

namespace {

void rebalance(Problem& problem) {
  double supply = 0.0;
  double demand = 0.0;
  double magnitude = 0.0;
  for (const auto& t : problem.terminals) {
    (t.mu > 0.0 ? supply : demand) += t.mu;
    magnitude += std::abs(t.mu);
  }
  const double imbalance = supply + demand;
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * magnitude;
  if (std::abs(imbalance) <= noise || std::abs(imbalance) > kMassBalanceTolerance || demand == 0.0) return;
  const double scale = supply / -demand;
  for (auto& t : problem.terminals)
    if (t.mu < 0.0) t.mu *= scale;
}

}  // namespace

Problem problem_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("problem: expected a JSON object");
  Problem problem;
  try {
    problem.alpha = j.at("alpha").get<double>();
    problem.dim = j.contains("dim") ? j.at("dim").get<int>() : 2;
    for (const auto& jt : j.at("terminals")) {
      Terminal t;
      t.position = jt.at("pos").get<std::vector<double>>();
      t.mu = jt.at("mu").get<double>();
      problem.terminals.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("problem: ") + e.what());
  }
  rebalance(problem);
  const auto violations = validate(problem);
  if (!violations.empty()) throw ParseError("problem: " + violations.front());
  return problem;
}

Problem load_problem(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  try {
    return problem_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_problem(const Problem& problem, const std::filesystem::path& path) { write_json_file(to_json(problem), path); }

}  // namespace bot

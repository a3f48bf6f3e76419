#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bot/point_set.hpp"

namespace bot {

/// Absolute tolerance on the total signed mass of a problem.
inline constexpr double kMassBalanceTolerance = 1e-9;

/// A terminal node. Positive `mu` is a supply (source), negative a demand (sink).
struct Terminal {
  std::vector<double> position;
  double mu = 0.0;

  friend bool operator==(const Terminal&, const Terminal&) = default;
};

/// A branched transport instance: terminals with signed masses and the flow exponent alpha.
struct Problem {
  double alpha = 0.5;
  int dim = 2;
  std::vector<Terminal> terminals;

  int size() const { return static_cast<int>(terminals.size()); }
  bool is_source(int i) const { return terminals[static_cast<std::size_t>(i)].mu > 0.0; }
  PointSet positions() const;

  friend bool operator==(const Problem&, const Problem&) = default;
};

/// Returns human-readable descriptions of every violated invariant; empty means valid.
std::vector<std::string> validate(const Problem& problem);

/// Throws std::invalid_argument listing the violations if `problem` is not valid.
void require_valid(const Problem& problem);

/// Random instance: alpha ~ U[0,1], number of sources ~ U{1..n-1}, masses ~ U[0,1]
/// normalized to unit total supply and demand, coordinates ~ U[0,1]^dim.
Problem generate_random_problem(int n, std::uint64_t seed, int dim = 2);

/// Coordinates multiplied by `factor`.
Problem scale_coordinates(const Problem& problem, double factor);
/// Masses multiplied by `factor`.
Problem scale_masses(const Problem& problem, double factor);

/// Axis-aligned bounding box of the terminal positions.
struct BoundingBox {
  std::vector<double> lo;
  std::vector<double> hi;
  double diagonal() const;
};
BoundingBox bounding_box(const Problem& problem);

// JSON: {"alpha": number, "dim": integer, "terminals": [{"pos": [...], "mu": number}, ...]}
nlohmann::json to_json(const Problem& problem);
/// Parses and validates. A mass imbalance above floating-point noise but within
/// kMassBalanceTolerance is removed by rescaling the sink masses.
Problem problem_from_json(const nlohmann::json& j);

Problem load_problem(const std::filesystem::path& path);
void save_problem(const Problem& problem, const std::filesystem::path& path);

}  // namespace bot

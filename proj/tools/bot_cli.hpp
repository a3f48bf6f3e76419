#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bot/search.hpp"

namespace bot::cli {

/// Everything needed to repeat a run: the command line, the effective configuration, seeds,
/// files touched and wall time.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;

  nlohmann::json to_json() const;
};

struct CompareOptions {
  std::vector<int> n_values{5, 6, 7};
  std::vector<int> dims{2};
  int problems_per_n = 10;
  std::uint64_t seed = 0;
  double omega = 1.0;
  SolverConfig geometry;
  unsigned workers = 0;
};

/// Heuristic versus brute force on freshly generated problems. Rows are sorted by
/// (dim, n, problem index); the summary holds per-(dim, n) ratio and iteration statistics.
nlohmann::json run_compare(const CompareOptions& options);

/// Fixed-width text table of a run_compare summary.
std::string format_compare_table(const nlohmann::json& results);

/// SVG drawing: sources red, sinks blue, disk radius proportional to sqrt|mu|, stroke width
/// proportional to |flow|^alpha. Solutions with dim > 2 are projected onto the first two axes and
/// a warning is written to `warnings`.
std::string render_svg(const Solution& solution, std::ostream& warnings);

/// Entry point of the `bot` executable. Returns the process exit code; failures print a single
/// line "error: <command>: <message>" to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bot::cli

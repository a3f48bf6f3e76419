#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "bot/json_io.hpp"
#include "bot/parallel.hpp"
#include "bot/verifier.hpp"
#include "bot_cli.hpp"

namespace bot::cli {

nlohmann::json RunManifest::to_json() const {
  return {{"command", command}, {"argv", argv},       {"config", config},          {"seeds", seeds},
          {"inputs", inputs},   {"outputs", outputs}, {"wall_seconds", wall_seconds}};
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double sq = 0.0;
  for (double x : v) sq += (x - m) * (x - m);
  return std::sqrt(sq / static_cast<double>(v.size() - 1));
}

std::uint64_t problem_seed(std::uint64_t base, int dim, int n, int index) {
  return derive_seed(derive_seed(derive_seed(base, static_cast<std::uint64_t>(dim)), static_cast<std::uint64_t>(n)),
                     static_cast<std::uint64_t>(index));
}

}  // namespace

nlohmann::json run_compare(const CompareOptions& options) {
  struct Shard {
    int dim, n, index;
  };
  std::vector<Shard> shards;
  for (int dim : options.dims)
    for (int n : options.n_values)
      for (int p = 0; p < options.problems_per_n; ++p) shards.push_back({dim, n, p});
  std::sort(shards.begin(), shards.end(), [](const Shard& a, const Shard& b) {
    return std::tie(a.dim, a.n, a.index) < std::tie(b.dim, b.n, b.index);
  });

  std::vector<nlohmann::json> rows(shards.size());
  parallel_for(shards.size(), [&](std::size_t i) {
    const auto& s = shards[i];
    const auto seed = problem_seed(options.seed, s.dim, s.n, s.index);
    const Problem problem = generate_random_problem(s.n, seed, s.dim);
    HeuristicConfig hc;
    hc.omega = options.omega;
    hc.seed = seed;
    hc.geometry = options.geometry;
    const Solution heuristic = greedy_heuristic(problem, hc);
    BruteForceConfig bc;
    bc.seed = seed;
    bc.geometry = options.geometry;
    bc.workers = 1;
    const Solution exact = brute_force(problem, bc);
    rows[i] = {{"dim", s.dim},
               {"n", s.n},
               {"problem", s.index},
               {"seed", seed},
               {"alpha", problem.alpha},
               {"heuristic_cost", heuristic.cost},
               {"brute_force_cost", exact.cost},
               {"ratio", heuristic.cost / exact.cost},
               {"iterations_tried", heuristic.meta.iterations_tried},
               {"iterations_accepted", heuristic.meta.iterations_accepted},
               {"heuristic_seconds", heuristic.meta.wall_seconds},
               {"brute_force_seconds", exact.meta.wall_seconds}};
  }, options.workers);

  std::map<std::pair<int, int>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : rows) {
    auto& g = groups[{r["dim"].get<int>(), r["n"].get<int>()}];
    g.first.push_back(r["ratio"].get<double>());
    g.second.push_back(r["iterations_tried"].get<double>());
  }
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& [key, g] : groups) {
    summary.push_back({{"dim", key.first},
                       {"n", key.second},
                       {"count", g.first.size()},
                       {"mean_ratio", mean(g.first)},
                       {"median_ratio", median(g.first)},
                       {"max_ratio", *std::max_element(g.first.begin(), g.first.end())},
                       {"min_ratio", *std::min_element(g.first.begin(), g.first.end())},
                       {"mean_iterations", mean(g.second)},
                       {"std_iterations", stddev(g.second)}});
  }
  return {{"rows", rows}, {"summary", summary}};
}

std::string format_compare_table(const nlohmann::json& results) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%4s %4s %6s %11s %11s %11s %11s %9s\n", "dim", "n", "count", "mean_ratio",
                "median", "max_ratio", "min_ratio", "iters");
  out << line;
  for (const auto& s : results.at("summary")) {
    std::snprintf(line, sizeof line, "%4d %4d %6d %11.6f %11.6f %11.6f %11.6f %5.1f±%-4.1f\n", s["dim"].get<int>(),
                  s["n"].get<int>(), s["count"].get<int>(), s["mean_ratio"].get<double>(),
                  s["median_ratio"].get<double>(), s["max_ratio"].get<double>(), s["min_ratio"].get<double>(),
                  s["mean_iterations"].get<double>(), s["std_iterations"].get<double>());
    out << line;
  }
  return out.str();
}

namespace {

std::string one_line(std::string msg) {
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  while (!msg.empty() && msg.back() == ' ') msg.pop_back();
  return msg;
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(path + ": cannot open file for writing");
  f << text;
  if (!f) throw std::runtime_error(path + ": write failed");
}

nlohmann::json geometry_json(const SolverConfig& g) {
  return {{"eta", g.eta}, {"max_iters", g.max_iters}, {"clip", g.clip}, {"beta", g.beta}};
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  RunManifest manifest;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  // Writes `j` to `path`, or to stdout when path is empty, plus the manifest next to the file.
  void emit(const nlohmann::json& j, const std::string& path) {
    if (path.empty()) {
      out << j.dump(2) << '\n';
      return;
    }
    write_json_file(j, path);
    manifest.outputs.push_back(path);
    write_manifest(path);
  }

  void write_manifest(const std::string& output_path) {
    manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json_file(manifest.to_json(), output_path + ".manifest.json");
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Branched optimal transport solver", "bot"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  // generate
  int gen_n = 0;
  int gen_dim = 2;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Write a random problem");
  generate->add_option("-n,--n", gen_n, "Number of terminals")->required()->check(CLI::Range(2, INT_MAX));
  generate->add_option("--dim", gen_dim, "Dimension")->check(CLI::Range(2, INT_MAX));
  generate->add_option("--seed", gen_seed, "Random seed");
  generate->add_option("-o,--out", gen_out, "Output problem file (stdout if omitted)");

  // solve
  std::string solve_in;
  std::string solve_out;
  std::string solve_init = "mst";
  HeuristicConfig hc;
  auto* solve = app.add_subcommand("solve", "Greedy topology search with IRLS geometry");
  solve->add_option("problem", solve_in, "Problem file")->required();
  solve->add_option("--init", solve_init, "Initial topology")->check(CLI::IsMember({"star", "mst"}));
  solve->add_option("--omega", hc.omega, "Reconnection kernel width factor")->check(CLI::PositiveNumber);
  solve->add_option("--seed", hc.seed, "Random seed");
  solve->add_option("--min-improvement", hc.min_improvement, "Relative cost drop required to accept a move")
      ->check(CLI::Range(0.0, 0.5));
  solve->add_option("--eta", hc.geometry.eta, "Relative improvement threshold")->check(CLI::PositiveNumber);
  solve->add_option("--max-iters", hc.geometry.max_iters, "Geometry iteration cap")->check(CLI::NonNegativeNumber);
  solve->add_option("-o,--out", solve_out, "Output solution file (stdout if omitted)");

  // brute
  std::string brute_in;
  std::string brute_out;
  BruteForceConfig bc;
  auto* brute = app.add_subcommand("brute", "Exact solution by enumerating every full topology");
  brute->add_option("problem", brute_in, "Problem file")->required();
  brute->add_option("--seed", bc.seed, "Random seed");
  brute->add_option("--eta", bc.geometry.eta, "Relative improvement threshold")->check(CLI::PositiveNumber);
  brute->add_option("--max-iters", bc.geometry.max_iters, "Geometry iteration cap")->check(CLI::NonNegativeNumber);
  brute->add_option("--cap", bc.cap, "Largest admissible number of terminals")->check(CLI::Range(3, 12));
  brute->add_option("-o,--out", brute_out, "Output solution file (stdout if omitted)");

  // compare
  CompareOptions co;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "Heuristic versus brute force on random problems");
  compare->add_option("--n", co.n_values, "Terminal counts")->delimiter(',')->check(CLI::Range(3, 10));
  compare->add_option("--problems", co.problems_per_n, "Problems per terminal count")->check(CLI::Range(1, INT_MAX));
  compare->add_option("--dims", co.dims, "Dimensions")->delimiter(',')->check(CLI::Range(2, INT_MAX));
  compare->add_option("--seed", co.seed, "Base seed");
  compare->add_option("--omega", co.omega, "Reconnection kernel width factor")->check(CLI::PositiveNumber);
  compare->add_option("--eta", co.geometry.eta, "Relative improvement threshold")->check(CLI::PositiveNumber);
  compare->add_option("-o,--out", compare_out, "Output results file");

  // verify-inequality
  double v_eps = 1e-3;
  double v_delta = 1e-3;
  double v_threshold = kDefaultVerifyThreshold;
  int v_depth = kDefaultVerifyDepth;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify-inequality", "Certify the coupled-branching margin by cuboid subdivision");
  verify->add_option("--eps", v_eps, "Distance of the alpha range from 1")->check(CLI::PositiveNumber);
  verify->add_option("--delta", v_delta, "Smallest m1")->check(CLI::PositiveNumber);
  verify->add_option("--threshold", v_threshold, "Required lower bound")->check(CLI::PositiveNumber);
  verify->add_option("--max-depth", v_depth, "Subdivision depth limit")->check(CLI::NonNegativeNumber);
  verify->add_option("-o,--out", verify_out, "Output report file (stdout if omitted)");

  // render
  std::string render_in;
  std::string render_out;
  auto* render = app.add_subcommand("render", "Draw a solution as SVG");
  render->add_option("solution", render_in, "Solution file")->required();
  render->add_option("-o,--out", render_out, "Output SVG file (stdout if omitted)");

  std::string command = "bot";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  Context ctx{out, err, {}};
  for (int i = 0; i < argc; ++i) ctx.manifest.argv.emplace_back(argv[i]);
  const auto* chosen = app.get_subcommands().front();
  command = chosen->get_name();
  ctx.manifest.command = command;

  try {
    if (chosen == generate) {
      const Problem problem = generate_random_problem(gen_n, gen_seed, gen_dim);
      ctx.manifest.config = {{"n", gen_n}, {"dim", gen_dim}};
      ctx.manifest.seeds = {gen_seed};
      ctx.emit(to_json(problem), gen_out);
    } else if (chosen == solve) {
      hc.init = initial_topology_from_string(solve_init);
      const Problem problem = load_problem(solve_in);
      const Solution solution = greedy_heuristic(problem, hc);
      ctx.manifest.config = {{"init", solve_init},
                               {"omega", hc.omega},
                               {"min_improvement", hc.min_improvement},
                               {"geometry", geometry_json(hc.geometry)}};
      ctx.manifest.seeds = {hc.seed};
      ctx.manifest.inputs = {solve_in};
      ctx.emit(to_json(solution), solve_out);
    } else if (chosen == brute) {
      const Problem problem = load_problem(brute_in);
      const Solution solution = brute_force(problem, bc);
      ctx.manifest.config = {{"cap", bc.cap}, {"geometry", geometry_json(bc.geometry)}};
      ctx.manifest.seeds = {bc.seed};
      ctx.manifest.inputs = {brute_in};
      ctx.emit(to_json(solution), brute_out);
    } else if (chosen == compare) {
      const auto results = run_compare(co);
      ctx.manifest.config = {{"n", co.n_values},
                             {"dims", co.dims},
                             {"problems_per_n", co.problems_per_n},
                             {"omega", co.omega},
                             {"geometry", geometry_json(co.geometry)},
                             {"workers", worker_count()}};
      ctx.manifest.seeds = {co.seed};
      out << format_compare_table(results);
      if (!compare_out.empty()) ctx.emit(results, compare_out);
    } else if (chosen == verify) {
      const auto report = verify_region(v_eps, v_delta, v_threshold, v_depth);
      ctx.manifest.config = {{"eps", v_eps}, {"delta", v_delta}, {"threshold", v_threshold}, {"max_depth", v_depth}};
      ctx.emit(to_json(report), verify_out);
      if (!report.all_positive) {
        err << "error: verify-inequality: lower bound not certified above " << v_threshold << " (min bound "
            << report.failing_bound << ")\n";
        return 3;
      }
    } else if (chosen == render) {
      const Solution solution = load_solution(render_in);
      const std::string svg = render_svg(solution, err);
      ctx.manifest.inputs = {render_in};
      if (render_out.empty()) {
        out << svg;
      } else {
        write_text(svg, render_out);
        ctx.manifest.outputs = {render_out};
        ctx.write_manifest(render_out);
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << command << ": " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}

}  // namespace bot::cli

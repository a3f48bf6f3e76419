#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

#include "bot_cli.hpp"

namespace bot::cli {

namespace {

// styling
constexpr double kCanvas = 600.0;
constexpr double kMargin = 40.0;
constexpr double kMaxStroke = 8.0;
constexpr double kMinStroke = 0.5;
constexpr double kMaxRadius = 12.0;
constexpr double kBpRadius = 2.0;
constexpr const char* kSourceColor = "#d62728";
constexpr const char* kSinkColor = "#1f77b4";
constexpr const char* kEdgeColor = "#333333";
constexpr const char* kBpColor = "#555555";

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

}  // namespace

std::string render_svg(const Solution& solution, std::ostream& warnings) {
  const auto& problem = solution.problem;
  if (problem.dim > 2) warnings << "warning: render: projecting " << problem.dim << "-dimensional solution onto the first two axes\n";
  const PointSet coords = solution.all_coords();

  double lo_x = coords[0][0], hi_x = lo_x, lo_y = coords[0][1], hi_y = lo_y;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    lo_x = std::min(lo_x, coords[i][0]);
    hi_x = std::max(hi_x, coords[i][0]);
    lo_y = std::min(lo_y, coords[i][1]);
    hi_y = std::max(hi_y, coords[i][1]);
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
  const double scale = (kCanvas - 2.0 * kMargin) / span;
  auto sx = [&](double x) { return kMargin + (x - lo_x) * scale; };
  auto sy = [&](double y) { return kCanvas - kMargin - (y - lo_y) * scale; };

  double max_weight = 0.0;
  for (double f : solution.flows.flow) max_weight = std::max(max_weight, flow_weight(f, problem.alpha));
  double max_mu = 0.0;
  for (const auto& t : problem.terminals) max_mu = std::max(max_mu, std::abs(t.mu));

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kCanvas) << "\" height=\"" << num(kCanvas)
      << "\" viewBox=\"0 0 " << num(kCanvas) << ' ' << num(kCanvas) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<g id=\"edges\" stroke=\"" << kEdgeColor << "\" stroke-linecap=\"round\">\n";
  const auto& edges = solution.topology.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto a = coords[static_cast<std::size_t>(edges[e].u)];
    const auto b = coords[static_cast<std::size_t>(edges[e].v)];
    const double w = max_weight > 0.0 ? flow_weight(solution.flows.flow[e], problem.alpha) / max_weight : 0.0;
    svg << "<line x1=\"" << num(sx(a[0])) << "\" y1=\"" << num(sy(a[1])) << "\" x2=\"" << num(sx(b[0])) << "\" y2=\""
        << num(sy(b[1])) << "\" stroke-width=\"" << num(std::max(kMinStroke, kMaxStroke * w)) << "\"/>\n";
  }
  svg << "</g>\n<g id=\"branching-points\" fill=\"" << kBpColor << "\">\n";
  for (std::size_t b = 0; b < solution.bp_coords.size(); ++b) {
    const auto p = solution.bp_coords[b];
    svg << "<circle cx=\"" << num(sx(p[0])) << "\" cy=\"" << num(sy(p[1])) << "\" r=\"" << num(kBpRadius) << "\"/>\n";
  }
  svg << "</g>\n<g id=\"terminals\">\n";
  for (const auto& t : problem.terminals) {
    const double r = max_mu > 0.0 ? kMaxRadius * std::sqrt(std::abs(t.mu) / max_mu) : kMaxRadius;
    svg << "<circle cx=\"" << num(sx(t.position[0])) << "\" cy=\"" << num(sy(t.position[1])) << "\" r=\"" << num(r)
        << "\" fill=\"" << (t.mu > 0.0 ? kSourceColor : kSinkColor) << "\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace bot::cli

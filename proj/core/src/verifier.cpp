#include "bot/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bot/angles.hpp"
#include "bot/parallel.hpp"

namespace bot {

namespace {

void check_simplex(double m1, double m2, const char* fn) {
  if (!(m1 > 0.0 && m2 > 0.0 && m1 + m2 < 1.0)) throw std::domain_error(std::string(fn) + ": masses outside the open simplex");
}

}  // namespace

double gamma(double alpha, double m1, double m2) {
  check_simplex(m1, m2, "gamma");
  const double m3 = 1.0 - m1 - m2;
  return h_angle(alpha, m1 / (m1 + m2)) - f_angle(alpha, m1) + h_angle(alpha, m3 / (m3 + m2)) - f_angle(alpha, m3);
}

double gamma1(double alpha, double m_star, double m2) {
  check_simplex(m_star, m2, "gamma1");
  return f_angle(alpha, 1.0 - m_star) + f_angle(alpha, 1.0 - m2 / (1.0 - m_star)) - f_angle(alpha, 1.0 - m_star - m2);
}

double gamma2(double alpha, double m_star, double m2) {
  check_simplex(m_star, m2, "gamma2");
  return h_angle(alpha, m_star / (m_star + m2)) + f_angle(alpha, m2 / (1.0 - m_star)) - h_angle(alpha, m_star);
}

std::vector<Cuboid> Cuboid::split() const {
  const double am = 0.5 * (alpha_lo + alpha_hi);
  const double m1m = 0.5 * (m1_lo + m1_hi);
  const double m2m = 0.5 * (m2_lo + m2_hi);
  std::vector<Cuboid> out;
  out.reserve(8);
  for (int bits = 0; bits < 8; ++bits) {
    Cuboid c;
    c.alpha_lo = bits & 1 ? am : alpha_lo;
    c.alpha_hi = bits & 1 ? alpha_hi : am;
    c.m1_lo = bits & 2 ? m1m : m1_lo;
    c.m1_hi = bits & 2 ? m1_hi : m1m;
    c.m2_lo = bits & 4 ? m2m : m2_lo;
    c.m2_hi = bits & 4 ? m2_hi : m2m;
    out.push_back(c);
  }
  return out;
}

bool Cuboid::outside_band() const { return m2_hi < 0.5 - m1_hi || m2_lo > 1.0 - 2.0 * m1_lo; }

Cuboid Cuboid::clipped_to_band() const {
  Cuboid c = *this;
  c.m2_lo = std::max(m2_lo, 0.5 - m1_hi);
  c.m2_hi = std::min(m2_hi, 1.0 - 2.0 * m1_lo);
  return c;
}

double lower_bound_gamma2(const Cuboid& c, double arg_shift) {
  const bool inside = c.alpha_lo >= 0.5 && c.alpha_hi <= 1.0 && c.alpha_lo <= c.alpha_hi && c.m1_lo > 0.0 &&
                      c.m1_hi <= 0.25 && c.m1_lo <= c.m1_hi && c.m2_lo >= 0.25 && c.m2_lo <= c.m2_hi && c.m2_hi < 1.0;
  if (!inside) throw std::domain_error("lower_bound_gamma2: cuboid outside the verified region");
  const double k_first = c.m1_hi / (c.m1_hi + c.m2_lo);
  const double k_second = std::min(1.0, c.m2_hi / (1.0 - c.m1_hi));
  return h_angle_closed(c.alpha_hi, k_first, arg_shift) + f_angle_closed(c.alpha_hi, k_second, arg_shift) -
         h_angle_closed(c.alpha_lo, c.m1_lo, -arg_shift);
}

namespace {

struct Task {
  Cuboid box;
  int depth = 0;
};

struct Tally {
  long long processed = 0;
  long long discarded = 0;
  long long leaves = 0;
  int max_depth = 0;
  double min_bound = std::numeric_limits<double>::infinity();
  std::optional<Task> failing;
  double failing_bound = 0.0;
};

enum class Verdict { Discarded, Accepted, Split, Failed };

Verdict visit(const Task& task, double threshold, int depth_limit, Tally& tally) {
  if (task.box.outside_band()) {
    ++tally.discarded;
    return Verdict::Discarded;
  }
  ++tally.processed;
  tally.max_depth = std::max(tally.max_depth, task.depth);
  const double bound = lower_bound_gamma2(task.box.clipped_to_band());
  if (bound > threshold) {
    ++tally.leaves;
    tally.min_bound = std::min(tally.min_bound, bound);
    return Verdict::Accepted;
  }
  if (task.depth >= depth_limit) {
    tally.failing = task;
    tally.failing_bound = bound;
    return Verdict::Failed;
  }
  return Verdict::Split;
}

}  // namespace

VerificationReport verify_region(double eps, double delta, double threshold, int max_depth, unsigned workers) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("verify_region: eps must lie in (0, 0.5)");
  if (!(delta > 0.0 && delta < 0.25)) throw std::invalid_argument("verify_region: delta must lie in (0, 0.25)");
  if (!(threshold > 0.0)) throw std::invalid_argument("verify_region: threshold must be positive");
  if (max_depth < 0) throw std::invalid_argument("verify_region: max_depth must be non-negative");
  const auto start = std::chrono::steady_clock::now();
  if (workers == 0) workers = worker_count();

  const Cuboid root{0.5, 1.0 - eps, delta, 0.25, 0.25, 1.0 - 2.0 * delta};
  Tally head;
  std::vector<Task> frontier{{root, 0}};
  bool failed = false;
  // expand breadth-first until there is enough independent work per worker
  const std::size_t wanted = std::size_t{64} * workers;
  while (!frontier.empty() && frontier.size() < wanted && !failed) {
    std::vector<Task> next;
    for (const auto& task : frontier) {
      const auto verdict = visit(task, threshold, max_depth, head);
      if (verdict == Verdict::Failed) {
        failed = true;
        break;
      }
      if (verdict == Verdict::Split)
        for (const auto& child : task.box.split()) next.push_back({child, task.depth + 1});
    }
    frontier = std::move(next);
  }

  std::vector<Tally> tallies(failed ? 0 : frontier.size());
  std::atomic<bool> stop{failed};
  parallel_for(tallies.size(), [&](std::size_t i) {
    std::vector<Task> stack{frontier[i]};
    Tally& tally = tallies[i];
    while (!stack.empty() && !stop.load(std::memory_order_relaxed)) {
      const Task task = stack.back();
      stack.pop_back();
      const auto verdict = visit(task, threshold, max_depth, tally);
      if (verdict == Verdict::Failed) {
        stop = true;
        break;
      }
      if (verdict == Verdict::Split) {
        const auto children = task.box.split();
        for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back({*it, task.depth + 1});
      }
    }
  }, workers);

  VerificationReport report;
  report.eps = eps;
  report.delta = delta;
  report.threshold = threshold;
  report.depth_limit = max_depth;
  tallies.insert(tallies.begin(), head);
  double min_bound = std::numeric_limits<double>::infinity();
  int failing_depth = -1;
  for (const auto& t : tallies) {
    report.cuboids_processed += t.processed;
    report.cuboids_discarded += t.discarded;
    report.leaves += t.leaves;
    report.max_depth = std::max(report.max_depth, t.max_depth);
    min_bound = std::min(min_bound, t.min_bound);
    if (t.failing && t.failing->depth > failing_depth) {
      failing_depth = t.failing->depth;
      report.failing = t.failing->box;
      report.failing_bound = t.failing_bound;
    }
  }
  report.all_positive = !stop.load() && report.leaves > 0;
  report.min_lower_bound = std::isfinite(min_bound) ? min_bound : 0.0;
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

AuditReport monotonicity_audit(int grid_resolution) {
  if (grid_resolution < 2) throw std::invalid_argument("monotonicity_audit: grid_resolution must be at least 2");
  AuditReport report;
  report.grid_resolution = grid_resolution;
  const int r = grid_resolution;
  // rounding slack for comparisons of neighbouring grid values
  constexpr double kSlack = 1e-14;
  auto interior = [r](int i) { return (i + 1.0) / (r + 1.0); };
  auto fail = [&report](const std::string& what, double alpha, double k) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " at alpha=" << alpha << ", k=" << k;
    report.violations.push_back(msg.str());
  };

  for (int i = 0; i < r; ++i) {
    const double alpha = interior(i);
    for (int j = 0; j + 1 < r; ++j) {
      const double k0 = interior(j);
      const double k1 = interior(j + 1);
      ++report.checks;
      if (f_angle(alpha, k1) > f_angle(alpha, k0) + kSlack) fail("f increases in k", alpha, k0);
      ++report.checks;
      if (!(f_angle(alpha, k0) < std::numbers::pi / 2)) fail("f reaches pi/2", alpha, k0);
      if (alpha > 0.5) {
        ++report.checks;
        // h falls towards k = 1/2 from both sides
        const bool below_half = k1 <= 0.5;
        const bool above_half = k0 >= 0.5;
        if (below_half && h_angle(alpha, k1) > h_angle(alpha, k0) + kSlack) fail("h increases in k below 1/2", alpha, k0);
        if (above_half && h_angle(alpha, k1) + kSlack < h_angle(alpha, k0)) fail("h decreases in k above 1/2", alpha, k0);
      }
    }
  }
  for (int j = 0; j < r; ++j) {
    const double k = interior(j);
    for (int i = 0; i + 1 < r; ++i) {
      const double a0 = interior(i);
      const double a1 = interior(i + 1);
      ++report.checks;
      if (h_angle(a1, k) > h_angle(a0, k) + kSlack) fail("h increases in alpha", a0, k);
      if (a0 >= 0.5) {
        ++report.checks;
        if (f_angle(a1, k) > f_angle(a0, k) + kSlack) fail("f increases in alpha above 1/2", a0, k);
      }
    }
  }
  return report;
}

nlohmann::json to_json(const Cuboid& c) {
  return {{"alpha", {c.alpha_lo, c.alpha_hi}}, {"m1", {c.m1_lo, c.m1_hi}}, {"m2", {c.m2_lo, c.m2_hi}}};
}

nlohmann::json to_json(const VerificationReport& report) {
  nlohmann::json j = {{"all_positive", report.all_positive},
                      {"cuboids_processed", report.cuboids_processed},
                      {"cuboids_discarded", report.cuboids_discarded},
                      {"leaves", report.leaves},
                      {"max_depth", report.max_depth},
                      {"depth_limit", report.depth_limit},
                      {"min_lower_bound", report.min_lower_bound},
                      {"eps", report.eps},
                      {"delta", report.delta},
                      {"threshold", report.threshold},
                      {"wall_seconds", report.wall_seconds}};
  if (report.failing) {
    j["failing_cuboid"] = to_json(*report.failing);
    j["failing_bound"] = report.failing_bound;
  }
  return j;
}

nlohmann::json to_json(const AuditReport& report) {
  return {{"grid_resolution", report.grid_resolution},
          {"checks", report.checks},
          {"ok", report.ok()},
          {"violations", report.violations}};
}

}  // namespace bot

#include "bot/angles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bot {

namespace {

constexpr double kPi = std::numbers::pi;

double clamped_acos(double x) { return std::acos(std::clamp(x, -1.0, 1.0)); }

void check_domain(double alpha, double k, const char* fn) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error(std::string(fn) + ": alpha outside [0,1]");
  if (!(k > 0.0 && k < 1.0)) throw std::domain_error(std::string(fn) + ": k outside (0,1)");
}

// At alpha = 1 both arguments equal 1 identically; evaluating them would leave a rounding error
// that arccos magnifies to ~1e-8 near its endpoint.
double f_argument(double alpha, double k) {
  if (alpha == 1.0) return 1.0;
  return (std::pow(k, 2.0 * alpha) + 1.0 - std::pow(1.0 - k, 2.0 * alpha)) / (2.0 * std::pow(k, alpha));
}

double h_argument(double alpha, double k) {
  if (alpha == 1.0) return 1.0;
  return (1.0 - std::pow(k, 2.0 * alpha) - std::pow(1.0 - k, 2.0 * alpha)) /
         (2.0 * std::pow(k, alpha) * std::pow(1.0 - k, alpha));
}

// one-sided limits at k -> 0+ (f) and k -> 0+/1- (h)
double f_limit_at_zero(double alpha) {
  if (alpha == 0.0) return kPi / 3.0;
  if (alpha == 1.0) return 0.0;
  return kPi / 2.0;
}

double h_limit_at_ends(double alpha) {
  if (alpha == 0.0) return 2.0 * kPi / 3.0;
  if (alpha == 1.0) return 0.0;
  return kPi / 2.0;
}

}  // namespace

double f_angle(double alpha, double k) {
  check_domain(alpha, k, "f_angle");
  return clamped_acos(f_argument(alpha, k));
}

double h_angle(double alpha, double k) {
  check_domain(alpha, k, "h_angle");
  return clamped_acos(h_argument(alpha, k));
}

double f_angle_closed(double alpha, double k, double arg_shift) {
  k = std::clamp(k, 0.0, 1.0);
  if (k == 0.0) {
    // the limit value shifted consistently with the argument
    return clamped_acos(std::cos(f_limit_at_zero(alpha)) + arg_shift);
  }
  return clamped_acos(f_argument(alpha, k) + arg_shift);
}

double h_angle_closed(double alpha, double k, double arg_shift) {
  k = std::clamp(k, 0.0, 1.0);
  if (k == 0.0 || k == 1.0) return clamped_acos(std::cos(h_limit_at_ends(alpha)) + arg_shift);
  return clamped_acos(h_argument(alpha, k) + arg_shift);
}

AsymmetricAngles asymmetric_angles(double alpha, double m1, double m2) {
  if (!(m1 > 0.0 && m2 > 0.0)) throw std::invalid_argument("asymmetric_angles: flows must be positive");
  if (m1 > m2) throw std::invalid_argument("asymmetric_angles: requires m1 <= m2, swap the child roles");
  if (m1 == m2) return {kPi - h_limit_at_ends(alpha), f_limit_at_zero(alpha), true};
  const double k = (m2 - m1) / m2;
  return {kPi - h_angle(alpha, k), f_angle(alpha, k), false};
}

const char* to_string(BranchingKind kind) {
  switch (kind) {
    case BranchingKind::Y: return "Y";
    case BranchingKind::V: return "V";
    case BranchingKind::L1: return "L1";
    case BranchingKind::L2: return "L2";
  }
  return "?";
}

ChildAngles child_angles(double alpha, double m1, double m2, BranchingMode mode) {
  if (!(m1 > 0.0 && m2 > 0.0)) throw std::invalid_argument("child_angles: flows must be positive");
  if (mode == BranchingMode::Symmetric) {
    const double k = m1 / (m1 + m2);
    return {f_angle(alpha, k), f_angle(alpha, 1.0 - k), false};
  }
  if (m1 <= m2) {
    const auto a = asymmetric_angles(alpha, m1, m2);
    return {a.first, a.second, a.degenerate};
  }
  const auto a = asymmetric_angles(alpha, m2, m1);
  return {a.second, a.first, a.degenerate};
}

double enclosed_angle(std::span<const double> vertex, std::span<const double> p, std::span<const double> q) {
  double dot = 0.0;
  double np = 0.0;
  double nq = 0.0;
  for (std::size_t k = 0; k < vertex.size(); ++k) {
    const double u = p[k] - vertex[k];
    const double v = q[k] - vertex[k];
    dot += u * v;
    np += u * u;
    nq += v * v;
  }
  if (np == 0.0 || nq == 0.0) throw DegenerateGeometry("enclosed_angle: coincident points");
  return clamped_acos(dot / std::sqrt(np * nq));
}

BranchingClass classify_branching(std::span<const double> a0, std::span<const double> a1,
                                  std::span<const double> a2, double m1, double m2, double alpha,
                                  BranchingMode mode) {
  if (std::equal(a0.begin(), a0.end(), a1.begin()) || std::equal(a0.begin(), a0.end(), a2.begin()) ||
      std::equal(a1.begin(), a1.end(), a2.begin())) {
    throw DegenerateGeometry("classify_branching: coincident input points");
  }
  const auto angles = child_angles(alpha, m1, m2, mode);
  BranchingClass out;
  out.angle1 = angles.first;
  out.angle2 = angles.second;

  const double psi = enclosed_angle(a0, a1, a2);  // at the parent
  const double phi = enclosed_angle(a1, a2, a0);  // at child 1
  const double rho = enclosed_angle(a2, a0, a1);  // at child 2
  const double slack[3] = {psi - (angles.first + angles.second), phi - (kPi - angles.second),
                           rho - (kPi - angles.first)};
  constexpr BranchingKind kinds[3] = {BranchingKind::V, BranchingKind::L1, BranchingKind::L2};

  int holding = 0;
  int chosen = -1;
  for (int c = 0; c < 3; ++c) {
    if (slack[c] >= -kTransientTolerance) {
      ++holding;
      if (chosen < 0) chosen = c;
    }
  }
  if (chosen >= 0) {
    out.kind = kinds[chosen];
    out.transient = holding > 1 || std::abs(slack[chosen]) <= kTransientTolerance;
  }
  return out;
}

}  // namespace bot

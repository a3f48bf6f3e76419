#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace bot {

/// Coupled-branching optimality margins for one source splitting into sinks of masses m1, m2 and
/// m3 = 1 - m1 - m2. A positive value of any of them rules out an optimal degree-4 branching.
/// Masses must be positive with m1 + m2 < 1 (std::domain_error otherwise).
double gamma(double alpha, double m1, double m2);
/// Margins with the outer sink `m_star` (m1 or m3) singled out.
double gamma1(double alpha, double m_star, double m2);
double gamma2(double alpha, double m_star, double m2);

/// Axis-aligned box in (alpha, m1, m2).
struct Cuboid {
  double alpha_lo = 0.0, alpha_hi = 0.0;
  double m1_lo = 0.0, m1_hi = 0.0;
  double m2_lo = 0.0, m2_hi = 0.0;

  /// The eight half-size children, in (alpha, m1, m2) bit order.
  std::vector<Cuboid> split() const;
  /// True when no point of the box satisfies 0.5 - m1 <= m2 <= 1 - 2 m1.
  bool outside_band() const;
  /// The box with its m2 range narrowed to [0.5 - m1_hi, 1 - 2 m1_lo]; it still holds every
  /// in-band point of the original.
  Cuboid clipped_to_band() const;
};

/// Widening applied to every arccos argument in lower_bound_gamma2.
inline constexpr double kArgumentShift = 1e-12;

/// Lower bound of gamma2(alpha, m1, m2) over the cuboid from the monotonicity of the angle
/// functions in alpha > 0.5, k <= 1/2. `arg_shift` widens each arccos argument conservatively.
/// Throws std::domain_error unless the cuboid lies in alpha in [0.5,1], m1 in (0,0.25], m2 >= 0.25.
double lower_bound_gamma2(const Cuboid& c, double arg_shift = kArgumentShift);

struct VerificationReport {
  bool all_positive = false;
  long long cuboids_processed = 0;
  long long cuboids_discarded = 0;
  long long leaves = 0;
  int max_depth = 0;
  /// Smallest bound among accepted leaves.
  double min_lower_bound = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double threshold = 0.0;
  int depth_limit = 0;
  /// Deepest cuboid whose bound stayed at or below the threshold.
  std::optional<Cuboid> failing;
  double failing_bound = 0.0;
  double wall_seconds = 0.0;
};

inline constexpr double kDefaultVerifyThreshold = 1e-4;
inline constexpr int kDefaultVerifyDepth = 40;

/// Octree certification of gamma2 > threshold over alpha in [0.5, 1-eps], m1 in [delta, 0.25],
/// m2 in [0.5-m1, 1-2 m1]. Cuboids crossing the band edge are bounded over their in-band part. Throws std::invalid_argument for non-positive parameters.
VerificationReport verify_region(double eps, double delta, double threshold = kDefaultVerifyThreshold,
                                 int max_depth = kDefaultVerifyDepth, unsigned workers = 0);

struct AuditReport {
  int grid_resolution = 0;
  long long checks = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Grid check of the monotonicity properties lower_bound_gamma2 relies on.
AuditReport monotonicity_audit(int grid_resolution);

nlohmann::json to_json(const Cuboid& c);
nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const AuditReport& report);

}  // namespace bot

#pragma once

#include <span>
#include <stdexcept>

namespace bot {

/// Angular tolerance (radians) below which a V/L condition counts as holding with equality.
inline constexpr double kTransientTolerance = 1e-9;

/// Optimal angle between a child edge carrying the flow fraction k and the straight
/// continuation of the parent edge. Requires alpha in [0,1] and k in (0,1) (std::domain_error).
double f_angle(double alpha, double k);

/// Optimal angle enclosed by the two child edges; equals f(alpha,k) + f(alpha,1-k).
double h_angle(double alpha, double k);

/// f and h extended to the closed interval k in [0,1] by their one-sided limits, with the
/// arccos argument shifted by `arg_shift` before clamping to [-1,1]. Used for rigorous bounds.
double f_angle_closed(double alpha, double k, double arg_shift = 0.0);
double h_angle_closed(double alpha, double k, double arg_shift = 0.0);

/// Optimal child angles for a branching where one child edge flows into the BP and the other
/// out of it. `first` belongs to the child with the smaller flow m1, `second` to the larger m2.
struct AsymmetricAngles {
  double first = 0.0;
  double second = 0.0;
  /// m1 == m2: the parent edge carries no flow and the k -> 0 limit was returned.
  bool degenerate = false;
};

/// Requires 0 < m1 <= m2; throws std::invalid_argument for m1 > m2 (caller swaps roles).
AsymmetricAngles asymmetric_angles(double alpha, double m1, double m2);

enum class BranchingMode { Symmetric, Asymmetric };
enum class BranchingKind { Y, V, L1, L2 };

const char* to_string(BranchingKind kind);

/// Optimal angles of child 1 and child 2 measured against the continuation of the parent edge.
/// The children enclose first + second; child i and the parent edge enclose pi - angle_i.
struct ChildAngles {
  double first = 0.0;
  double second = 0.0;
  bool degenerate = false;
};

/// Symmetric: (f(k), f(1-k)) with k = m1/(m1+m2). Asymmetric: the roles of asymmetric_angles(),
/// assigned back to the caller's child order. Flows are magnitudes (> 0).
ChildAngles child_angles(double alpha, double m1, double m2, BranchingMode mode);

struct BranchingClass {
  BranchingKind kind = BranchingKind::Y;
  /// Optimal angles of child 1 and child 2 (see ChildAngles).
  double angle1 = 0.0;
  double angle2 = 0.0;
  /// The selected V/L condition holds with equality (within kTransientTolerance), or several
  /// conditions hold at once.
  bool transient = false;
};

class DegenerateGeometry : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Decides whether the optimal BP joining parent a0 and children a1, a2 (flows m1, m2) sits at a0
/// (V), at a1 (L1), at a2 (L2), or in the interior (Y). Precedence V > L1 > L2.
/// Throws DegenerateGeometry for coincident points.
BranchingClass classify_branching(std::span<const double> a0, std::span<const double> a1,
                                  std::span<const double> a2, double m1, double m2, double alpha,
                                  BranchingMode mode);

/// Angle at `vertex` enclosed by the rays to `p` and `q`, in [0, pi].
double enclosed_angle(std::span<const double> vertex, std::span<const double> p, std::span<const double> q);

}  // namespace bot

#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

#include "altraj/trajectory.hpp"
#include "altraj/univar_roots.hpp"

namespace altraj {

/// A constraint G(p^(i)_1(t), p^(i)_2(t), p^(i)_3(t)) < 0 required on the
/// whole piece, with G a multivariate polynomial given as a term list.
/// Non-strict (<= 0) constraints are handled as G < epsilon.
struct ConstraintSpec {
  struct Term {
    double coefficient = 0.0;         // d_c
    std::array<int, 3> exponents{};   // e_1, e_2, e_3
  };

  int derivative_order = 0;
  std::vector<Term> terms;
  bool strict = true;
  double epsilon = 1e-6;  // in the constraint's natural units

  int max_degree() const;  // d_g
  /// l1 norm of the term coefficients; the natural magnitude scale used for
  /// tightness tolerances.
  double scale() const;
};

/// ||p'(t)||^2 - v_max^2 < 0 on derivative order 1.
ConstraintSpec builtin_speed_constraint(double v_max);
/// ||p''(t)||^2 - a_max^2 < 0 on derivative order 2.
ConstraintSpec builtin_accel_constraint(double a_max);
/// r_safe^2 - ||p(t) - center||^2 < 0 on derivative order 0, expanded to
/// the multivariate term form.
ConstraintSpec builtin_obstacle_constraint(const Eigen::Vector3d& center, double r_safe);

/// Substitutes the piece's per-axis derivative polynomials into G and
/// expands; degree is at most d_g * (N - i).
UnivariatePolynomial compose_constraint_polynomial(
    const ConstraintSpec& spec, const Eigen::Matrix<double, Eigen::Dynamic, 3>& coefficients,
    double duration);

struct FeasibilityVerdict {
  bool feasible = false;
  std::optional<int> violated_constraint;  // index into the constraint list
  bool tight = false;                      // implies feasible
};

/// Resolution-independent feasibility of one piece: endpoint signs plus a
/// Sturm root-existence check on (0, T) per constraint. Near-zero endpoint
/// values are absorbed by shifting the constraint by its epsilon. With
/// compute_tightness, also reports whether the maximum of some composed
/// constraint polynomial sits within the tight band below zero.
FeasibilityVerdict check_piece(const Eigen::Matrix<double, Eigen::Dynamic, 3>& coefficients,
                               double duration, const std::vector<ConstraintSpec>& constraints,
                               bool compute_tightness = true);

/// Per-piece verdicts; the trajectory is feasible iff all pieces are.
std::vector<FeasibilityVerdict> check_trajectory(const Trajectory& traj,
                                                 const std::vector<ConstraintSpec>& constraints,
                                                 bool compute_tightness = true);

bool all_feasible(const std::vector<FeasibilityVerdict>& verdicts);

}  // namespace altraj

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "altraj/cost.hpp"
#include "altraj/feasibility.hpp"
#include "altraj/spatial_phase.hpp"
#include "altraj/temporal_phase.hpp"

namespace altraj {

struct SolverConfig {
  int max_iterations = 64;      // K
  double stop_threshold = 1e-4; // delta
  /// When set, the stop test is |J_l - J_c| < stop_threshold * |J_l|
  /// (the benchmark's relative-decrease rule) instead of the absolute one.
  bool relative_stop = false;
  double bisection_tol = 1e-4;  // lambda and duration interval widths
  int recursion_depth_limit = 8;
  /// Observer invoked with the iterate after every full iteration;
  /// used by tests to audit feasibility preservation. May be empty.
  std::function<void(const Trajectory&)> on_iterate;

  void validate() const;
};

enum class TerminationReason { kThreshold, kMaxIterations };

struct SolveReport {
  explicit SolveReport(Trajectory t) : trajectory(std::move(t)) {}

  Trajectory trajectory;
  /// Objective after every half-step (spatial update, then temporal
  /// update), preceded by the initial objective. Nonincreasing.
  std::vector<double> objective_history;
  int iterations = 0;
  TerminationReason termination = TerminationReason::kMaxIterations;
  std::vector<int> tight_pieces;  // Delta, ascending piece indices
  std::vector<std::string> recursion_trace;
};

/// Alternating minimization without constraints: durations are initialized
/// per piece from the provided free derivatives, then exact spatial and
/// temporal updates alternate until the objective decrease drops below the
/// threshold or the iteration budget runs out.
SolveReport optimize_unconstrained(const std::vector<WaypointDerivatives>& fixed,
                                   const Eigen::Matrix<double, Eigen::Dynamic, 3>& initial_free,
                                   const ObjectiveConfig& config, const SolverConfig& solver);

/// Largest step toward the unconstrained spatial optimum that stays
/// feasible: returns 1 outright when the target is feasible, otherwise
/// bisects on [0, 1] and returns the feasible lower bound. The current
/// point must be feasible.
double line_search_lambda(const std::vector<WaypointDerivatives>& fixed,
                          const Eigen::Matrix<double, Eigen::Dynamic, 3>& current_free,
                          const Eigen::Matrix<double, Eigen::Dynamic, 3>& target_free,
                          const std::vector<double>& durations,
                          const std::vector<ConstraintSpec>& constraints,
                          const SolverConfig& solver);

/// Duration update under constraints: all stationary durations are
/// candidates; for each infeasible one a bisection toward the neighboring
/// feasible candidate (or the previous duration) locates the boundary
/// duration where a constraint tightens. Returns the feasible candidate of
/// least cost; the previous (feasible) duration is always a fallback.
double optimal_piece_duration_constrained(const BoundaryCondition& bc, double previous_duration,
                                          const std::vector<ConstraintSpec>& constraints,
                                          const ObjectiveConfig& config,
                                          const SolverConfig& solver);

/// Constrained alternating minimization: line-searched spatial updates and
/// constrained duration updates, a tight-piece set maintained per
/// iteration, and on termination with tight pieces a recursive solve of the
/// slack sub-trajectories with the tight boundary data frozen. Every
/// iterate is feasible.
SolveReport optimize_constrained(const Trajectory& initial,
                                 const std::vector<ConstraintSpec>& constraints,
                                 const ObjectiveConfig& config, const SolverConfig& solver);

/// Conservative feasible starting point: per-segment durations from segment
/// length against the speed/acceleration bounds found in the constraint
/// list (times a safety factor of two), zero free derivatives, then all
/// durations doubled until the feasibility check passes (at most 30
/// doublings).
Trajectory initial_feasible_trajectory(const std::vector<WaypointDerivatives>& fixed,
                                       const std::vector<ConstraintSpec>& constraints,
                                       const ObjectiveConfig& config);

}  // namespace altraj

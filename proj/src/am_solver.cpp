#include "altraj/am_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "altraj/errors.hpp"

namespace altraj {

namespace {

constexpr double kDurationGuard = 1e6;

void apply_free(std::vector<WaypointDerivatives>* waypoints,
                const Eigen::Matrix<double, Eigen::Dynamic, 3>& free_values) {
  int row = 0;
  for (auto& w : *waypoints) {
    for (int r = 0; r < w.values.rows(); ++r) {
      if (!w.fixed[static_cast<size_t>(r)]) w.values.row(r) = free_values.row(row++);
    }
  }
  if (row != free_values.rows()) throw ValidationError("free value row count mismatch");
}

BoundaryCondition boundary_of(const std::vector<WaypointDerivatives>& waypoints, int piece) {
  BoundaryCondition bc;
  bc.start = waypoints[static_cast<size_t>(piece)].values;
  bc.end = waypoints[static_cast<size_t>(piece) + 1].values;
  return bc;
}

// Objective evaluated through the rational per-piece form with long double
// accumulation; every history entry goes through this one path so that
// half-step comparisons are not polluted by evaluation-path noise.
double objective_value(const std::vector<WaypointDerivatives>& waypoints,
                       const std::vector<double>& durations,
                       const RationalCostExpander& expander, double rho) {
  long double j = 0.0L;
  for (size_t m = 0; m < durations.size(); ++m) {
    j += expander.expand(boundary_of(waypoints, static_cast<int>(m))).evaluate(durations[m], rho);
  }
  return static_cast<double>(j);
}

bool stop_test(double j_last, double j_current, const SolverConfig& solver) {
  const double decrease = std::abs(j_last - j_current);
  if (solver.relative_stop) {
    return decrease < solver.stop_threshold * std::max(std::abs(j_last), 1e-300);
  }
  return decrease < solver.stop_threshold;
}

void guard_duration(double duration) {
  if (!std::isfinite(duration) || duration > kDurationGuard) {
    throw NumericalError("solver: divergent piece duration (unbounded sublevel set)");
  }
}

double constrained_duration_update(const BoundaryCondition& bc, double previous_duration,
                                   const std::vector<ConstraintSpec>& constraints,
                                   const ObjectiveConfig& config, const SolverConfig& solver,
                                   const RationalCostExpander& expander,
                                   const MappingConstants& constants) {
  const RationalCost rc = expander.expand(bc);
  const std::vector<double> roots = stationary_durations(rc, config.rho);

  auto feasible_at = [&](double T) {
    return check_piece(piece_coefficients(bc, T, constants), T, constraints, false).feasible;
  };

  // All candidate points, ascending, with feasibility classification.
  std::vector<double> points = roots;
  points.push_back(previous_duration);
  std::sort(points.begin(), points.end());
  std::vector<bool> feasible(points.size());
  for (size_t i = 0; i < points.size(); ++i) feasible[i] = feasible_at(points[i]);

  std::vector<double> candidates;
  for (size_t i = 0; i < points.size(); ++i) {
    if (feasible[i]) candidates.push_back(points[i]);
  }

  // For each infeasible stationary point, bisect toward the nearest
  // feasible neighbor on both sides; the boundary duration where the
  // constraint tightens is a candidate.
  auto bisect_boundary = [&](double infeasible_pt, double feasible_pt) {
    double a = infeasible_pt, b = feasible_pt;
    while (std::abs(a - b) > solver.bisection_tol) {
      const double mid = 0.5 * (a + b);
      if (feasible_at(mid)) {
        b = mid;
      } else {
        a = mid;
      }
    }
    return b;
  };
  for (size_t i = 0; i < points.size(); ++i) {
    if (feasible[i]) continue;
    for (size_t l = i; l-- > 0;) {
      if (feasible[l]) {
        candidates.push_back(bisect_boundary(points[i], points[l]));
        break;
      }
    }
    for (size_t r = i + 1; r < points.size(); ++r) {
      if (feasible[r]) {
        candidates.push_back(bisect_boundary(points[i], points[r]));
        break;
      }
    }
  }

  if (candidates.empty()) {
    throw InfeasibleError("constrained duration update: previous duration is infeasible");
  }
  std::sort(candidates.begin(), candidates.end());
  double best_t = candidates.front();
  double best_j = rc.evaluate(best_t, config.rho);
  for (double t : candidates) {
    const double j = rc.evaluate(t, config.rho);
    if (j < best_j) {
      best_j = j;
      best_t = t;
    }
  }
  return best_t;
}

struct ConstrainedOutcome {
  std::vector<WaypointDerivatives> waypoints;
  std::vector<double> durations;
  std::vector<double> history;
  int iterations = 0;
  TerminationReason termination = TerminationReason::kMaxIterations;
  std::vector<int> tight;
};

ConstrainedOutcome optimize_constrained_impl(const Trajectory& initial,
                                             const std::vector<ConstraintSpec>& constraints,
                                             const ObjectiveConfig& config,
                                             const SolverConfig& solver, int depth,
                                             std::vector<std::string>* trace);

// Recursive splitting: freeze the boundary data of tight pieces, re-run the
// solver on every maximal run of slack pieces, and merge the results back.
void split_and_recurse(std::vector<WaypointDerivatives>* waypoints,
                       std::vector<double>* durations, const std::vector<bool>& tight,
                       const std::vector<ConstraintSpec>& constraints,
                       const ObjectiveConfig& config, const SolverConfig& solver, int depth,
                       std::vector<std::string>* trace, std::vector<int>* extra_tight) {
  const int M = static_cast<int>(durations->size());
  int begin = 0;
  while (begin < M) {
    if (tight[static_cast<size_t>(begin)]) {
      ++begin;
      continue;
    }
    int end = begin;
    while (end + 1 < M && !tight[static_cast<size_t>(end) + 1]) ++end;

    std::vector<WaypointDerivatives> sub(waypoints->begin() + begin,
                                         waypoints->begin() + end + 2);
    // Waypoints shared with a tight piece (or cut out of the middle of the
    // trajectory) carry its boundary data and are frozen entirely.
    if (begin > 0) sub.front().fixed.assign(sub.front().fixed.size(), true);
    if (end < M - 1) sub.back().fixed.assign(sub.back().fixed.size(), true);
    std::vector<double> sub_durations(durations->begin() + begin, durations->begin() + end + 1);

    try {
      ConstrainedOutcome sub_out = optimize_constrained_impl(
          Trajectory(sub, sub_durations), constraints, config, solver, depth + 1, trace);
      std::ostringstream line;
      line << "depth " << depth + 1 << ": pieces [" << begin << ", " << end << "] J "
           << sub_out.history.front() << " -> " << sub_out.history.back();
      trace->push_back(line.str());
      for (int w = 0; w <= end - begin + 1; ++w) {
        (*waypoints)[static_cast<size_t>(begin + w)].values =
            sub_out.waypoints[static_cast<size_t>(w)].values;
      }
      for (int m = 0; m <= end - begin; ++m) {
        (*durations)[static_cast<size_t>(begin + m)] =
            sub_out.durations[static_cast<size_t>(m)];
      }
      for (int m : sub_out.tight) extra_tight->push_back(begin + m);
    } catch (const ValidationError&) {
      // Degenerate sub-problem (e.g. frozen endpoints coincide): keep the
      // current feasible pieces.
      std::ostringstream line;
      line << "depth " << depth + 1 << ": pieces [" << begin << ", " << end
           << "] skipped (degenerate sub-problem)";
      trace->push_back(line.str());
    }
    begin = end + 1;
  }
}

ConstrainedOutcome optimize_constrained_impl(const Trajectory& initial,
                                             const std::vector<ConstraintSpec>& constraints,
                                             const ObjectiveConfig& config,
                                             const SolverConfig& solver, int depth,
                                             std::vector<std::string>* trace) {
  if (!all_feasible(check_trajectory(initial, constraints, false))) {
    throw InfeasibleError("constrained solver: initial trajectory is infeasible");
  }
  const RationalCostExpander expander(config);
  const auto constants = shared_mapping_constants(config.order);

  ConstrainedOutcome out;
  out.waypoints = initial.waypoints();
  out.durations = initial.durations();
  const int M = static_cast<int>(out.durations.size());
  std::vector<bool> tight(static_cast<size_t>(M), false);

  double j_last = objective_value(out.waypoints, out.durations, expander, config.rho);
  out.history.push_back(j_last);

  for (int k = 0; k < solver.max_iterations; ++k) {
    // Spatial phase with feasibility line search.
    const Eigen::Matrix<double, Eigen::Dynamic, 3> target =
        optimal_free_derivatives(out.waypoints, out.durations, config);
    if (target.rows() > 0) {
      const Eigen::Matrix<double, Eigen::Dynamic, 3> current = gather_rows(out.waypoints, false);
      const double lambda =
          line_search_lambda(out.waypoints, current, target, out.durations, constraints, solver);
      apply_free(&out.waypoints, current + lambda * (target - current));
    }
    out.history.push_back(objective_value(out.waypoints, out.durations, expander, config.rho));

    // Tight set maintenance at (new derivatives, old durations).
    {
      const auto verdicts =
          check_trajectory(Trajectory(out.waypoints, out.durations), constraints, true);
      for (int m = 0; m < M; ++m) tight[static_cast<size_t>(m)] = verdicts[static_cast<size_t>(m)].tight;
    }

    // Temporal phase under constraints.
    for (int m = 0; m < M; ++m) {
      double& T = out.durations[static_cast<size_t>(m)];
      T = constrained_duration_update(boundary_of(out.waypoints, m), T, constraints, config,
                                      solver, expander, *constants);
      guard_duration(T);
    }
    const double j_current = objective_value(out.waypoints, out.durations, expander, config.rho);
    out.history.push_back(j_current);
    out.iterations = k + 1;
    if (solver.on_iterate) solver.on_iterate(Trajectory(out.waypoints, out.durations));
    if (stop_test(j_last, j_current, solver)) {
      out.termination = TerminationReason::kThreshold;
      break;
    }
    j_last = j_current;
  }

  // Refresh the tight set against the final iterate so that the reported
  // set matches the verdicts of the returned trajectory.
  {
    const auto verdicts =
        check_trajectory(Trajectory(out.waypoints, out.durations), constraints, true);
    for (int m = 0; m < M; ++m) tight[static_cast<size_t>(m)] = verdicts[static_cast<size_t>(m)].tight;
  }
  for (int m = 0; m < M; ++m) {
    if (tight[static_cast<size_t>(m)]) out.tight.push_back(m);
  }

  const bool any_tight = !out.tight.empty();
  const bool all_tight = static_cast<int>(out.tight.size()) == M;
  if (any_tight && !all_tight && depth < solver.recursion_depth_limit) {
    std::vector<int> extra;
    split_and_recurse(&out.waypoints, &out.durations, tight, constraints, config, solver, depth,
                      trace, &extra);
    out.history.push_back(objective_value(out.waypoints, out.durations, expander, config.rho));
    for (int m : extra) {
      if (!tight[static_cast<size_t>(m)]) out.tight.push_back(m);
    }
    std::sort(out.tight.begin(), out.tight.end());
  }
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iterations < 1) throw ValidationError("solver: max_iterations must be >= 1");
  if (!(stop_threshold > 0.0)) throw ValidationError("solver: stop_threshold must be positive");
  if (!(bisection_tol > 0.0)) throw ValidationError("solver: bisection_tol must be positive");
  if (recursion_depth_limit < 0) throw ValidationError("solver: negative recursion depth limit");
}

SolveReport optimize_unconstrained(const std::vector<WaypointDerivatives>& fixed,
                                   const Eigen::Matrix<double, Eigen::Dynamic, 3>& initial_free,
                                   const ObjectiveConfig& config, const SolverConfig& solver) {
  config.validate();
  solver.validate();
  if (!(config.rho > 0.0)) throw ValidationError("unconstrained solver requires rho > 0");
  if (fixed.size() < 2) throw ValidationError("solver needs at least two waypoints");
  const RationalCostExpander expander(config);

  std::vector<WaypointDerivatives> waypoints = fixed;
  apply_free(&waypoints, initial_free);
  const int M = static_cast<int>(waypoints.size()) - 1;
  std::vector<double> durations(static_cast<size_t>(M));

  auto temporal_sweep = [&]() {
    for (int m = 0; m < M; ++m) {
      double& T = durations[static_cast<size_t>(m)];
      T = optimal_piece_duration(boundary_of(waypoints, m), config, expander);
      guard_duration(T);
    }
  };

  temporal_sweep();
  double j_last = objective_value(waypoints, durations, expander, config.rho);

  SolveReport report{Trajectory(waypoints, durations)};
  report.objective_history.push_back(j_last);

  for (int k = 0; k < solver.max_iterations; ++k) {
    const Eigen::Matrix<double, Eigen::Dynamic, 3> free_values =
        optimal_free_derivatives(waypoints, durations, config);
    apply_free(&waypoints, free_values);
    report.objective_history.push_back(
        objective_value(waypoints, durations, expander, config.rho));

    temporal_sweep();
    const double j_current = objective_value(waypoints, durations, expander, config.rho);
    report.objective_history.push_back(j_current);
    report.iterations = k + 1;
    if (solver.on_iterate) solver.on_iterate(Trajectory(waypoints, durations));
    if (stop_test(j_last, j_current, solver)) {
      report.termination = TerminationReason::kThreshold;
      break;
    }
    j_last = j_current;
  }
  report.trajectory = Trajectory(waypoints, durations);
  return report;
}

double line_search_lambda(const std::vector<WaypointDerivatives>& fixed,
                          const Eigen::Matrix<double, Eigen::Dynamic, 3>& current_free,
                          const Eigen::Matrix<double, Eigen::Dynamic, 3>& target_free,
                          const std::vector<double>& durations,
                          const std::vector<ConstraintSpec>& constraints,
                          const SolverConfig& solver) {
  if (current_free.rows() != target_free.rows()) {
    throw ValidationError("line search: free value shapes differ");
  }
  auto feasible_at = [&](double lambda) {
    const Eigen::Matrix<double, Eigen::Dynamic, 3> mix =
        current_free + lambda * (target_free - current_free);
    const Trajectory t = assemble(fixed, mix, durations);
    return all_feasible(check_trajectory(t, constraints, false));
  };
  if (feasible_at(1.0)) return 1.0;
  if (!feasible_at(0.0)) {
    throw InfeasibleError("line search: the current point is infeasible");
  }
  double lo = 0.0, hi = 1.0;
  while (hi - lo > solver.bisection_tol) {
    const double mid = 0.5 * (lo + hi);
    if (feasible_at(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double optimal_piece_duration_constrained(const BoundaryCondition& bc, double previous_duration,
                                          const std::vector<ConstraintSpec>& constraints,
                                          const ObjectiveConfig& config,
                                          const SolverConfig& solver) {
  config.validate();
  solver.validate();
  if (!(previous_duration > 0.0)) {
    throw ValidationError("constrained duration update: previous duration must be positive");
  }
  const RationalCostExpander expander(config);
  const auto constants = shared_mapping_constants(config.order);
  return constrained_duration_update(bc, previous_duration, constraints, config, solver, expander,
                                     *constants);
}

SolveReport optimize_constrained(const Trajectory& initial,
                                 const std::vector<ConstraintSpec>& constraints,
                                 const ObjectiveConfig& config, const SolverConfig& solver) {
  config.validate();
  solver.validate();
  if (!(config.rho > 0.0)) throw ValidationError("constrained solver requires rho > 0");
  std::vector<std::string> trace;
  ConstrainedOutcome out =
      optimize_constrained_impl(initial, constraints, config, solver, 0, &trace);
  SolveReport report{Trajectory(out.waypoints, out.durations)};
  report.objective_history = std::move(out.history);
  report.iterations = out.iterations;
  report.termination = out.termination;
  report.tight_pieces = std::move(out.tight);
  report.recursion_trace = std::move(trace);
  return report;
}

Trajectory initial_feasible_trajectory(const std::vector<WaypointDerivatives>& fixed,
                                       const std::vector<ConstraintSpec>& constraints,
                                       const ObjectiveConfig& config) {
  config.validate();
  if (fixed.size() < 2) throw ValidationError("initial trajectory needs at least two waypoints");

  // Bounds read off the constraints: an order-i constraint with negative
  // constant term -b^2 caps the i-th derivative norm at b.
  double v_bound = -1.0, a_bound = -1.0;
  for (const ConstraintSpec& spec : constraints) {
    double constant = 0.0;
    for (const auto& term : spec.terms) {
      if (term.exponents[0] == 0 && term.exponents[1] == 0 && term.exponents[2] == 0) {
        constant += term.coefficient;
      }
    }
    if (constant >= 0.0) continue;
    const double bound = std::sqrt(-constant);
    if (spec.derivative_order == 1) v_bound = v_bound < 0.0 ? bound : std::min(v_bound, bound);
    if (spec.derivative_order == 2) a_bound = a_bound < 0.0 ? bound : std::min(a_bound, bound);
  }
  if (v_bound <= 0.0) v_bound = 1.0;
  if (a_bound <= 0.0) a_bound = 1.0;

  std::vector<WaypointDerivatives> waypoints = fixed;
  for (auto& w : waypoints) {
    for (int r = 0; r < w.values.rows(); ++r) {
      if (!w.fixed[static_cast<size_t>(r)]) w.values.row(r).setZero();
    }
  }
  std::vector<double> durations(waypoints.size() - 1);
  for (size_t m = 0; m < durations.size(); ++m) {
    const double len = (waypoints[m + 1].values.row(0) - waypoints[m].values.row(0)).norm();
    durations[m] = std::max(2.0 * std::max(len / v_bound, std::sqrt(len / a_bound)), 1e-2);
  }

  for (int attempt = 0; attempt <= 30; ++attempt) {
    Trajectory traj(waypoints, durations);
    if (all_feasible(check_trajectory(traj, constraints, false))) return traj;
    for (double& T : durations) T *= 2.0;
  }
  throw InfeasibleError("initial trajectory: constraints still violated after 30 doublings");
}

}  // namespace altraj

#pragma once

#include <Eigen/Dense>
#include <memory>
#include <utility>
#include <vector>

#include "altraj/poly_core.hpp"

namespace altraj {

/// Derivatives of orders 0..S-1 at one waypoint, one column per axis, with a
/// per-order flag marking the row as fixed (part of the problem data) or
/// free (a decision variable). The position row is always fixed.
struct WaypointDerivatives {
  Eigen::Matrix<double, Eigen::Dynamic, 3> values;  // S x 3
  std::vector<bool> fixed;                          // per derivative order

  static WaypointDerivatives zero(int half_size);
};

/// The stacked endpoint derivative blocks (d_start, d_end) of one piece.
struct BoundaryCondition {
  Eigen::Matrix<double, Eigen::Dynamic, 3> start;  // S x 3
  Eigen::Matrix<double, Eigen::Dynamic, 3> end;    // S x 3

  /// (N+1) x 3 stack: start rows followed by end rows.
  Eigen::Matrix<double, Eigen::Dynamic, 3> stacked() const;
};

/// Coefficient matrix c = A(T)^-1 (d_start; d_end), ascending powers of the
/// local time, one column per axis.
Eigen::Matrix<double, Eigen::Dynamic, 3> piece_coefficients(const BoundaryCondition& bc,
                                                            double duration,
                                                            const MappingConstants& constants);

/// An M-piece trajectory: M+1 waypoint derivative blocks plus M positive
/// durations. Adjacent pieces share the waypoint block, so continuity of
/// orders 0..S-1 holds by construction. Immutable after construction; piece
/// coefficients and duration prefix sums are precomputed.
class Trajectory {
 public:
  Trajectory(std::vector<WaypointDerivatives> waypoints, std::vector<double> durations);

  int order() const { return order_; }
  int half_size() const { return half_size_; }
  int piece_count() const { return static_cast<int>(durations_.size()); }
  const std::vector<WaypointDerivatives>& waypoints() const { return waypoints_; }
  const std::vector<double>& durations() const { return durations_; }
  double total_duration() const { return cumulative_.back(); }

  BoundaryCondition piece_boundary(int piece) const;
  const Eigen::Matrix<double, Eigen::Dynamic, 3>& coefficients(int piece) const;

  /// Piece index containing global time t; boundaries resolve to the later
  /// piece. local_time receives t minus the piece start.
  int locate_piece(double t, double* local_time) const;

  /// i-th derivative of the trajectory at global time t in [0, total].
  Eigen::Vector3d evaluate(double t, int derivative) const;

 private:
  int order_ = 0;
  int half_size_ = 0;
  std::vector<WaypointDerivatives> waypoints_;
  std::vector<double> durations_;
  std::vector<double> cumulative_;  // size M+1, cumulative_[0] = 0
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 3>> coefficients_;
};

Eigen::Vector3d eval_trajectory(const Trajectory& traj, double t, int derivative);

/// Phi: scatters the fixed values (taken from the prototypes' fixed rows)
/// and the free values (canonical order: waypoint-major, then derivative
/// order; axes are the columns) into a trajectory.
Trajectory assemble(const std::vector<WaypointDerivatives>& fixed,
                    const Eigen::Matrix<double, Eigen::Dynamic, 3>& free_values,
                    const std::vector<double>& durations);

/// Phi^-1: extracts the free values (canonical order) and durations.
std::pair<Eigen::Matrix<double, Eigen::Dynamic, 3>, std::vector<double>> disassemble(
    const Trajectory& traj);

/// Number of free (waypoint, order) rows under the given prototypes.
int count_free_rows(const std::vector<WaypointDerivatives>& waypoints);

}  // namespace altraj

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "altraj/am_solver.hpp"

namespace altraj {

/// A trajectory optimization problem as read from / written to disk:
/// waypoints, objective, bounds, optional fixed-derivative overrides, and
/// solver settings. JSON on disk, schema-validated, defaults matching the
/// benchmark setup (N=5, rho=512, jerk weight 1, v_max=5, a_max=3.5).
struct ProblemFile {
  struct Obstacle {
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    double r_safe = 0.0;
  };
  struct Override {
    int waypoint = 0;
    int derivative_order = 0;
    Eigen::Vector3d value = Eigen::Vector3d::Zero();
  };

  int format_version = 1;
  int order = 5;
  double rho = 512.0;
  int d_min = 3;
  int d_max = 3;
  std::vector<double> weights = {1.0};
  std::optional<double> v_max = 5.0;
  std::optional<double> a_max = 3.5;
  std::vector<Obstacle> obstacles;
  std::vector<Eigen::Vector3d> waypoints;
  std::vector<Override> overrides;
  int max_iterations = 64;
  double stop_threshold = 1e-4;
  std::string stop_mode = "absolute";  // or "relative"

  ObjectiveConfig objective() const;
  SolverConfig solver() const;
  std::vector<ConstraintSpec> constraints() const;
  /// Waypoint prototypes: positions fixed everywhere, all orders fixed at
  /// zero on the first and last waypoint, interior derivatives free,
  /// overrides applied last.
  std::vector<WaypointDerivatives> prototypes() const;
};

ProblemFile load_problem(const std::string& path);
void save_problem(const ProblemFile& problem, const std::string& path);

/// One sampled state of the trajectory.
struct SampleRow {
  double t = 0.0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d acceleration = Eigen::Vector3d::Zero();
};

/// Samples at t = 0, dt, 2dt, ... plus a final row exactly at the total
/// duration; rows strictly increasing in t.
std::vector<SampleRow> dump_samples(const Trajectory& traj, double dt);
/// CSV with header t,px,py,pz,vx,vy,vz,ax,ay,az.
void write_samples_csv(const std::vector<SampleRow>& rows, std::ostream& os);

/// Waypoints by random walk with per-axis steps uniform on [-3, 8],
/// benchmark objective and bounds attached. Deterministic per seed across
/// platforms.
ProblemFile random_walk_problem(int num_pieces, std::uint64_t seed);

struct BenchmarkSizeResult {
  int pieces = 0;
  int trials = 0;
  int failures = 0;
  double unconstrained_mean_ms = 0.0;
  double unconstrained_stddev_ms = 0.0;
  double constrained_mean_ms = 0.0;
  double constrained_stddev_ms = 0.0;
  double unconstrained_normalized_cost = 1.0;  // the normalization base
  double mean_cost_ratio = 0.0;                // constrained / unconstrained
};

struct BenchmarkReport {
  std::uint64_t seed = 0;
  std::vector<BenchmarkSizeResult> sizes;
};

/// Runs the unconstrained and constrained solvers over random-walk
/// instances with the relative-0.001 stopping rule; wall time covers the
/// solver call only. Per-instance failures are counted, not fatal.
BenchmarkReport run_benchmark(const std::vector<int>& piece_counts, int trials,
                              std::uint64_t seed, bool median_of_three = false);

std::string benchmark_report_json(const BenchmarkReport& report);

/// Trajectory serialization for the `optimize --report` output and the
/// `check` input.
std::string trajectory_json(const Trajectory& traj);
Trajectory trajectory_from_json_file(const std::string& path);

}  // namespace altraj

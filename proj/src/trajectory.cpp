#include "altraj/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "altraj/errors.hpp"

namespace altraj {

namespace {

constexpr int kLinearScanLimit = 64;

void validate_waypoint_block(const WaypointDerivatives& w, int half_size) {
  if (w.values.rows() != half_size) {
    throw ValidationError("waypoint derivative block has inconsistent row count");
  }
  if (static_cast<int>(w.fixed.size()) != half_size) {
    throw ValidationError("waypoint fixed mask has inconsistent size");
  }
  if (!w.fixed[0]) {
    throw ValidationError("waypoint position row must be fixed");
  }
}

// The paper's setting excludes consecutive repeating waypoints with
// identical fixed boundary data; exact equality is rejected here,
// near-duplicates are the caller's responsibility.
bool identical_fixed_blocks(const WaypointDerivatives& a, const WaypointDerivatives& b) {
  if (a.fixed != b.fixed) return false;
  for (int r = 0; r < a.values.rows(); ++r) {
    if (!a.fixed[static_cast<size_t>(r)]) continue;
    for (int c = 0; c < 3; ++c) {
      if (a.values(r, c) != b.values(r, c)) return false;
    }
  }
  return true;
}

}  // namespace

WaypointDerivatives WaypointDerivatives::zero(int half_size) {
  WaypointDerivatives w;
  w.values = Eigen::Matrix<double, Eigen::Dynamic, 3>::Zero(half_size, 3);
  w.fixed.assign(static_cast<size_t>(half_size), false);
  w.fixed[0] = true;
  return w;
}

Eigen::Matrix<double, Eigen::Dynamic, 3> BoundaryCondition::stacked() const {
  Eigen::Matrix<double, Eigen::Dynamic, 3> d(start.rows() + end.rows(), 3);
  d.topRows(start.rows()) = start;
  d.bottomRows(end.rows()) = end;
  return d;
}

Eigen::Matrix<double, Eigen::Dynamic, 3> piece_coefficients(const BoundaryCondition& bc,
                                                            double duration,
                                                            const MappingConstants& constants) {
  if (!(duration > 0.0)) throw ValidationError("piece_coefficients: duration must be positive");
  if (bc.start.rows() != constants.half_size || bc.end.rows() != constants.half_size) {
    throw ValidationError("piece_coefficients: boundary condition size mismatch");
  }
  return mapping_matrix_inverse(constants, duration) * bc.stacked();
}

Trajectory::Trajectory(std::vector<WaypointDerivatives> waypoints, std::vector<double> durations)
    : waypoints_(std::move(waypoints)), durations_(std::move(durations)) {
  if (durations_.empty()) throw ValidationError("trajectory needs at least one piece");
  if (waypoints_.size() != durations_.size() + 1) {
    throw ValidationError("trajectory needs exactly M+1 waypoint blocks for M pieces");
  }
  half_size_ = static_cast<int>(waypoints_.front().values.rows());
  order_ = 2 * half_size_ - 1;
  if (half_size_ < 2) throw ValidationError("trajectory order must be at least 3");
  for (const auto& w : waypoints_) validate_waypoint_block(w, half_size_);
  for (double T : durations_) {
    if (!(T > 0.0) || !std::isfinite(T)) {
      throw ValidationError("trajectory durations must be positive and finite");
    }
  }
  for (size_t m = 0; m + 1 < waypoints_.size(); ++m) {
    if (identical_fixed_blocks(waypoints_[m], waypoints_[m + 1])) {
      throw ValidationError("consecutive waypoints with identical fixed boundary blocks");
    }
  }
  cumulative_.resize(durations_.size() + 1);
  cumulative_[0] = 0.0;
  for (size_t m = 0; m < durations_.size(); ++m) {
    cumulative_[m + 1] = cumulative_[m] + durations_[m];
  }
  const auto constants = shared_mapping_constants(order_);
  coefficients_.reserve(durations_.size());
  for (int m = 0; m < piece_count(); ++m) {
    coefficients_.push_back(piece_coefficients(piece_boundary(m), durations_[static_cast<size_t>(m)], *constants));
  }
}

BoundaryCondition Trajectory::piece_boundary(int piece) const {
  if (piece < 0 || piece >= piece_count()) throw ValidationError("piece index out of range");
  BoundaryCondition bc;
  bc.start = waypoints_[static_cast<size_t>(piece)].values;
  bc.end = waypoints_[static_cast<size_t>(piece) + 1].values;
  return bc;
}

const Eigen::Matrix<double, Eigen::Dynamic, 3>& Trajectory::coefficients(int piece) const {
  if (piece < 0 || piece >= piece_count()) throw ValidationError("piece index out of range");
  return coefficients_[static_cast<size_t>(piece)];
}

int Trajectory::locate_piece(double t, double* local_time) const {
  const int M = piece_count();
  int m;
  if (M <= kLinearScanLimit) {
    m = 0;
    while (m < M - 1 && t >= cumulative_[static_cast<size_t>(m) + 1]) ++m;
  } else {
    const auto it = std::upper_bound(cumulative_.begin() + 1, cumulative_.end(), t);
    m = std::min(static_cast<int>(it - cumulative_.begin()) - 1, M - 1);
    m = std::max(m, 0);
  }
  if (local_time != nullptr) *local_time = t - cumulative_[static_cast<size_t>(m)];
  return m;
}

Eigen::Vector3d Trajectory::evaluate(double t, int derivative) const {
  if (derivative < 0) throw ValidationError("evaluate: negative derivative order");
  if (t < 0.0 || t > total_duration()) {
    throw ValidationError("evaluate: time outside [0, total duration]");
  }
  double local = 0.0;
  const int m = locate_piece(t, &local);
  const Eigen::VectorXd beta = eval_basis(order_, derivative, local);
  return coefficients_[static_cast<size_t>(m)].transpose() * beta;
}

Eigen::Vector3d eval_trajectory(const Trajectory& traj, double t, int derivative) {
  return traj.evaluate(t, derivative);
}

Trajectory assemble(const std::vector<WaypointDerivatives>& fixed,
                    const Eigen::Matrix<double, Eigen::Dynamic, 3>& free_values,
                    const std::vector<double>& durations) {
  if (free_values.rows() != count_free_rows(fixed)) {
    throw ValidationError("assemble: free value row count mismatch");
  }
  std::vector<WaypointDerivatives> waypoints = fixed;
  int row = 0;
  for (auto& w : waypoints) {
    for (int r = 0; r < w.values.rows(); ++r) {
      if (!w.fixed[static_cast<size_t>(r)]) {
        w.values.row(r) = free_values.row(row++);
      }
    }
  }
  return Trajectory(std::move(waypoints), durations);
}

std::pair<Eigen::Matrix<double, Eigen::Dynamic, 3>, std::vector<double>> disassemble(
    const Trajectory& traj) {
  Eigen::Matrix<double, Eigen::Dynamic, 3> free_values(count_free_rows(traj.waypoints()), 3);
  int row = 0;
  for (const auto& w : traj.waypoints()) {
    for (int r = 0; r < w.values.rows(); ++r) {
      if (!w.fixed[static_cast<size_t>(r)]) {
        free_values.row(row++) = w.values.row(r);
      }
    }
  }
  return {std::move(free_values), traj.durations()};
}

int count_free_rows(const std::vector<WaypointDerivatives>& waypoints) {
  int n = 0;
  for (const auto& w : waypoints) {
    for (bool f : w.fixed) {
      if (!f) ++n;
    }
  }
  return n;
}

}  // namespace altraj

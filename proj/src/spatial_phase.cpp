#include "altraj/spatial_phase.hpp"

#include <Eigen/SparseLU>

#include "altraj/errors.hpp"

namespace altraj {

namespace {

constexpr int kDenseLimit = 200;

}  // namespace

Eigen::Matrix<double, Eigen::Dynamic, 3> optimal_free_derivatives(
    const std::vector<WaypointDerivatives>& fixed, const std::vector<double>& durations,
    const ObjectiveConfig& config) {
  std::vector<std::vector<bool>> masks;
  masks.reserve(fixed.size());
  for (const auto& w : fixed) masks.push_back(w.fixed);
  const PartitionedQuadratic part = partitioned_quadratic(durations, masks, config);

  const int n_p = static_cast<int>(part.free_rows.size());
  if (n_p == 0) return Eigen::Matrix<double, Eigen::Dynamic, 3>(0, 3);

  const Eigen::Matrix<double, Eigen::Dynamic, 3> d_f = gather_rows(fixed, true);
  const Eigen::Matrix<double, Eigen::Dynamic, 3> rhs = -(part.R_PF * d_f);

  Eigen::Matrix<double, Eigen::Dynamic, 3> x(n_p, 3);
  if (n_p < kDenseLimit) {
    const Eigen::MatrixXd dense = Eigen::MatrixXd(part.R_PP);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(dense);
    x = lu.solve(rhs);
  } else {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(part.R_PP);
    if (lu.info() != Eigen::Success) {
      throw NumericalError("spatial phase: sparse factorization failed (singular system)");
    }
    x = lu.solve(rhs);
  }
  const double residual = (part.R_PP * x - rhs).norm();
  if (!(residual <= 1e-8 * (rhs.norm() + 1.0)) || !x.allFinite()) {
    throw NumericalError("spatial phase: singular or ill-conditioned system");
  }
  return x;
}

}  // namespace altraj

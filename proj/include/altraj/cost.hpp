#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "altraj/trajectory.hpp"

namespace altraj {

/// The time-regularized quadratic objective: rho * total duration plus
/// weighted integrals of squared derivative norms of orders
/// d_min .. d_max.
struct ObjectiveConfig {
  double rho = 0.0;
  int d_min = 1;
  int d_max = 1;
  std::vector<double> weights;  // weights[i] belongs to order d_min + i
  int order = 5;                // polynomial order N

  double weight(int derivative_order) const;
  void validate() const;
};

/// Q(T) = sum_i w_i * integral_0^T beta^(i) beta^(i)^T dt, entries in closed
/// form as monomials of T. Size (N+1) x (N+1).
Eigen::MatrixXd q_matrix(const ObjectiveConfig& config, double duration);

/// J_m = rho*T + trace{d^T A(T)^-T Q(T) A(T)^-1 d} for one piece.
double piece_cost(const BoundaryCondition& bc, double duration, const ObjectiveConfig& config);

/// The per-piece cost as an explicit rational function of the duration:
/// J_m(T) = rho*T + T^-p_n * sum_i alpha_i T^i with p_n = 2 d_max - 1 and
/// p_d = 2 (d_max - d_min) + N - 1.
struct RationalCost {
  std::vector<double> alpha;  // size p_d + 1
  int numerator_shift = 0;    // p_n
  int degree = 0;             // p_d

  double evaluate(double duration, double rho) const;
};

/// Expands boundary conditions into RationalCost coefficients by
/// accumulating the monomial structure of A(T)^-1 against Q(T). The
/// T-independent part of the accumulation is tabulated once per config, so
/// one expander should be reused across pieces and iterations.
class RationalCostExpander {
 public:
  explicit RationalCostExpander(const ObjectiveConfig& config);

  RationalCost expand(const BoundaryCondition& bc) const;
  int numerator_shift() const { return p_n_; }
  int degree() const { return p_d_; }

 private:
  struct Term {
    int row;          // index into the stacked boundary condition
    int col;          //
    int alpha_index;  // exponent + p_n
    double coefficient;
  };
  int n_ = 0;  // N + 1
  int p_n_ = 0;
  int p_d_ = 0;
  std::vector<Term> terms_;
};

RationalCost piece_cost_rational(const BoundaryCondition& bc, const ObjectiveConfig& config);

/// Sum of piece costs over the whole trajectory.
double total_cost(const Trajectory& traj, const ObjectiveConfig& config);
double total_cost(const std::vector<WaypointDerivatives>& fixed,
                  const Eigen::Matrix<double, Eigen::Dynamic, 3>& free_values,
                  const std::vector<double>& durations, const ObjectiveConfig& config);

/// Blocks of R(T) = C^T H(T) C in the fixed/free partition. The permutation
/// C is never materialized; rows are scattered through index maps. Row
/// identities are global (waypoint * S + order), listed in canonical order.
struct PartitionedQuadratic {
  Eigen::SparseMatrix<double> R_FF, R_FP, R_PF, R_PP;
  std::vector<int> fixed_rows;
  std::vector<int> free_rows;
  int half_size = 0;
};

PartitionedQuadratic partitioned_quadratic(const std::vector<double>& durations,
                                           const std::vector<std::vector<bool>>& fixed_masks,
                                           const ObjectiveConfig& config);

/// trace{(D_F; D_P)^T R (D_F; D_P)} evaluated through the four blocks.
double quadratic_energy(const PartitionedQuadratic& part,
                        const Eigen::Matrix<double, Eigen::Dynamic, 3>& fixed_values,
                        const Eigen::Matrix<double, Eigen::Dynamic, 3>& free_values);

/// Gathers the values of the fixed (or free) rows of the waypoint blocks in
/// canonical order.
Eigen::Matrix<double, Eigen::Dynamic, 3> gather_rows(
    const std::vector<WaypointDerivatives>& waypoints, bool fixed);

}  // namespace altraj

#pragma once

#include "altraj/cost.hpp"
#include "altraj/univar_roots.hpp"

namespace altraj {

/// The polynomial rho*T^(1+p_n) + sum_i (i - p_n) alpha_i T^i, obtained by
/// multiplying dJ_m/dT through by T^(1+p_n). Its positive roots are exactly
/// the stationary points of the per-piece cost.
UnivariatePolynomial stationarity_polynomial(const RationalCost& rc, double rho);

/// Exact minimizer of J_m over (0, inf) with the boundary condition fixed:
/// isolates and refines all positive stationary points, evaluates the
/// rational cost at each, and returns the global minimizer (ties toward the
/// smaller duration). Throws NumericalError when no stationary point exists
/// (degenerate boundary data).
double optimal_piece_duration(const BoundaryCondition& bc, const ObjectiveConfig& config);
double optimal_piece_duration(const BoundaryCondition& bc, const ObjectiveConfig& config,
                              const RationalCostExpander& expander);

/// Stationary durations (refined positive roots), ascending. Exposed for
/// the constrained duration update, which needs all candidates.
std::vector<double> stationary_durations(const RationalCost& rc, double rho);

}  // namespace altraj

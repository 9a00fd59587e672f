#pragma once

#include <Eigen/Dense>
#include <vector>

#include "altraj/cost.hpp"

namespace altraj {

/// Closed-form minimizer of J over the free derivatives with durations
/// fixed: solves R_PP X = -R_PF D_F (one factorization, three right-hand
/// columns). Sparse LU with fill-reducing ordering above 200 unknowns,
/// dense LU below. Returns the free values in canonical order; empty when
/// the problem has no free rows. Throws NumericalError on a singular
/// system.
Eigen::Matrix<double, Eigen::Dynamic, 3> optimal_free_derivatives(
    const std::vector<WaypointDerivatives>& fixed, const std::vector<double>& durations,
    const ObjectiveConfig& config);

}  // namespace altraj

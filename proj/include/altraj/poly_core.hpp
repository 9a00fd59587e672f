#pragma once

#include <Eigen/Dense>
#include <memory>

namespace altraj {

/// Constant matrices behind the boundary-condition <-> coefficient mapping
/// of an odd-order polynomial. With S = (N+1)/2, the mapping matrix and its
/// analytic inverse are assembled online from pure powers of the duration:
///
///   A(T)      = [ E            0            ]
///               [ F_ij T^(j-i) G_ij T^(S-i+j) ]
///   A(T)^-1   = [ U              0              ]
///               [ V_ij T^(j-i-S) W_ij T^(j-i-S) ]
///
/// E and U are diagonal, W = G^-1 (computed exactly over rationals),
/// V = -W F U. Immutable and shareable across threads.
struct MappingConstants {
  int order = 0;      // N, odd
  int half_size = 0;  // S = (N+1)/2
  Eigen::MatrixXd E, F, G, U, V, W;  // S x S
};

/// Builds the six constant matrices for odd order N >= 3. G is integer; its
/// inverse is computed by exact rational elimination before conversion to
/// floating point. Orders above 11 are rejected (the exact arithmetic would
/// overflow, and duration powers are ill-conditioned there anyway).
MappingConstants precompute_mapping_constants(int order);

/// Memoized shared constants per order; same contents as
/// precompute_mapping_constants.
std::shared_ptr<const MappingConstants> shared_mapping_constants(int order);

/// i-th derivative of the monomial basis (1, t, ..., t^N) evaluated at t,
/// length N+1. Zero vector when i exceeds N.
Eigen::VectorXd eval_basis(int order, int derivative, double t);

/// A(T): rows are B(0) stacked on B(T), i.e. basis derivatives of orders
/// 0..S-1 at both ends of the piece. Requires T > 0.
Eigen::MatrixXd mapping_matrix(const MappingConstants& constants, double duration);

/// The analytic inverse of A(T), assembled entrywise; no factorization.
Eigen::MatrixXd mapping_matrix_inverse(const MappingConstants& constants, double duration);

}  // namespace altraj

#include "altraj/cost.hpp"

#include <cmath>

#include "altraj/errors.hpp"

namespace altraj {

namespace {

double falling_factorial(int k, int i) {  // k (k-1) ... (k-i+1)
  double f = 1.0;
  for (int j = 0; j < i; ++j) f *= static_cast<double>(k - j);
  return f;
}

// Exponent and constant factor of entry (row, col) of A(T)^-1, which is a
// single power of T throughout. Returns false for structurally zero entries.
bool inverse_entry(const MappingConstants& mc, int row, int col, double* factor, int* exponent) {
  const int S = mc.half_size;
  if (row < S) {
    if (row != col) return false;
    *factor = mc.U(row, row);
    *exponent = 0;
    return true;
  }
  const int i0 = row - S;
  if (col < S) {
    *factor = mc.V(i0, col);
    *exponent = col - i0 - S;
  } else {
    *factor = mc.W(i0, col - S);
    *exponent = col - i0 - 2 * S;
  }
  return *factor != 0.0;
}

}  // namespace

double ObjectiveConfig::weight(int derivative_order) const {
  if (derivative_order < d_min || derivative_order > d_max) return 0.0;
  return weights[static_cast<size_t>(derivative_order - d_min)];
}

void ObjectiveConfig::validate() const {
  if (order < 3 || order % 2 == 0) throw ValidationError("objective: order must be odd and >= 3");
  if (d_min < 1 || d_min > d_max || d_max > order) {
    throw ValidationError("objective: requires 1 <= d_min <= d_max <= N");
  }
  if (static_cast<int>(weights.size()) != d_max - d_min + 1) {
    throw ValidationError("objective: weight count must match d_min..d_max");
  }
  bool any_positive = false;
  for (double w : weights) {
    if (w < 0.0) throw ValidationError("objective: weights must be nonnegative");
    if (w > 0.0) any_positive = true;
  }
  if (!any_positive) throw ValidationError("objective: at least one weight must be positive");
  if (rho < 0.0 || !std::isfinite(rho)) {
    throw ValidationError("objective: rho must be nonnegative");
  }
}

Eigen::MatrixXd q_matrix(const ObjectiveConfig& config, double duration) {
  config.validate();
  if (!(duration > 0.0)) throw ValidationError("q_matrix: duration must be positive");
  const int n = config.order + 1;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (int i = config.d_min; i <= config.d_max; ++i) {
    const double w = config.weight(i);
    if (w == 0.0) continue;
    for (int k = i; k < n; ++k) {
      for (int l = i; l < n; ++l) {
        const int e = k + l - 2 * i + 1;
        q(k, l) += w * falling_factorial(k, i) * falling_factorial(l, i) *
                   std::pow(duration, e) / static_cast<double>(e);
      }
    }
  }
  return q;
}

double piece_cost(const BoundaryCondition& bc, double duration, const ObjectiveConfig& config) {
  config.validate();
  if (!(duration > 0.0)) throw ValidationError("piece_cost: duration must be positive");
  const auto constants = shared_mapping_constants(config.order);
  const Eigen::Matrix<double, Eigen::Dynamic, 3> c = piece_coefficients(bc, duration, *constants);
  const Eigen::MatrixXd q = q_matrix(config, duration);
  return config.rho * duration + (c.transpose() * q * c).trace();
}

double RationalCost::evaluate(double duration, double rho) const {
  if (!(duration > 0.0)) throw ValidationError("RationalCost: duration must be positive");
  double s = 0.0;
  for (auto it = alpha.rbegin(); it != alpha.rend(); ++it) s = s * duration + *it;
  return rho * duration + s * std::pow(duration, -numerator_shift);
}

RationalCostExpander::RationalCostExpander(const ObjectiveConfig& config) {
  config.validate();
  const int N = config.order;
  n_ = N + 1;
  p_n_ = 2 * config.d_max - 1;
  p_d_ = 2 * (config.d_max - config.d_min) + N - 1;
  const auto constants = shared_mapping_constants(N);

  // trace{d^T A^-T Q A^-1 d} = sum over k,l,r,s of Q_kl Ainv_kr Ainv_ls DD_rs
  // with DD = d d^T; every factor is a single power of T, so each
  // combination contributes one alpha coefficient.
  std::vector<std::vector<double>> acc(
      static_cast<size_t>(n_ * n_), std::vector<double>(static_cast<size_t>(p_d_) + 1, 0.0));
  for (int i = config.d_min; i <= config.d_max; ++i) {
    const double w = config.weight(i);
    if (w == 0.0) continue;
    for (int k = i; k < n_; ++k) {
      for (int l = i; l < n_; ++l) {
        const int q_exp = k + l - 2 * i + 1;
        const double q_factor =
            w * falling_factorial(k, i) * falling_factorial(l, i) / static_cast<double>(q_exp);
        for (int r = 0; r < n_; ++r) {
          double f_kr;
          int e_kr;
          if (!inverse_entry(*constants, k, r, &f_kr, &e_kr)) continue;
          for (int s = 0; s < n_; ++s) {
            double f_ls;
            int e_ls;
            if (!inverse_entry(*constants, l, s, &f_ls, &e_ls)) continue;
            const int alpha_index = q_exp + e_kr + e_ls + p_n_;
            if (alpha_index < 0 || alpha_index > p_d_) {
              throw NumericalError("rational cost: exponent outside the expected range");
            }
            acc[static_cast<size_t>(r * n_ + s)][static_cast<size_t>(alpha_index)] +=
                q_factor * f_kr * f_ls;
          }
        }
      }
    }
  }
  for (int r = 0; r < n_; ++r) {
    for (int s = 0; s < n_; ++s) {
      const auto& row = acc[static_cast<size_t>(r * n_ + s)];
      for (int a = 0; a <= p_d_; ++a) {
        if (row[static_cast<size_t>(a)] != 0.0) {
          terms_.push_back({r, s, a, row[static_cast<size_t>(a)]});
        }
      }
    }
  }
}

RationalCost RationalCostExpander::expand(const BoundaryCondition& bc) const {
  const Eigen::Matrix<double, Eigen::Dynamic, 3> d = bc.stacked();
  if (d.rows() != n_) throw ValidationError("rational cost: boundary condition size mismatch");
  const Eigen::MatrixXd gram = d * d.transpose();
  RationalCost rc;
  rc.numerator_shift = p_n_;
  rc.degree = p_d_;
  rc.alpha.assign(static_cast<size_t>(p_d_) + 1, 0.0);
  for (const Term& t : terms_) {
    rc.alpha[static_cast<size_t>(t.alpha_index)] += t.coefficient * gram(t.row, t.col);
  }
  return rc;
}

RationalCost piece_cost_rational(const BoundaryCondition& bc, const ObjectiveConfig& config) {
  return RationalCostExpander(config).expand(bc);
}

double total_cost(const Trajectory& traj, const ObjectiveConfig& config) {
  double j = 0.0;
  for (int m = 0; m < traj.piece_count(); ++m) {
    j += piece_cost(traj.piece_boundary(m), traj.durations()[static_cast<size_t>(m)], config);
  }
  return j;
}

double total_cost(const std::vector<WaypointDerivatives>& fixed,
                  const Eigen::Matrix<double, Eigen::Dynamic, 3>& free_values,
                  const std::vector<double>& durations, const ObjectiveConfig& config) {
  return total_cost(assemble(fixed, free_values, durations), config);
}

PartitionedQuadratic partitioned_quadratic(const std::vector<double>& durations,
                                           const std::vector<std::vector<bool>>& fixed_masks,
                                           const ObjectiveConfig& config) {
  config.validate();
  if (durations.empty() || fixed_masks.size() != durations.size() + 1) {
    throw ValidationError("partitioned_quadratic: needs M durations and M+1 masks");
  }
  const auto constants = shared_mapping_constants(config.order);
  const int S = constants->half_size;
  const int M = static_cast<int>(durations.size());

  PartitionedQuadratic part;
  part.half_size = S;
  // global row id -> (partition, local index)
  std::vector<int> local_index((static_cast<size_t>(M) + 1) * static_cast<size_t>(S));
  std::vector<bool> is_fixed(local_index.size());
  for (int w = 0; w <= M; ++w) {
    if (static_cast<int>(fixed_masks[static_cast<size_t>(w)].size()) != S) {
      throw ValidationError("partitioned_quadratic: mask size mismatch");
    }
    for (int o = 0; o < S; ++o) {
      const int g = w * S + o;
      const bool f = fixed_masks[static_cast<size_t>(w)][static_cast<size_t>(o)];
      is_fixed[static_cast<size_t>(g)] = f;
      if (f) {
        local_index[static_cast<size_t>(g)] = static_cast<int>(part.fixed_rows.size());
        part.fixed_rows.push_back(g);
      } else {
        local_index[static_cast<size_t>(g)] = static_cast<int>(part.free_rows.size());
        part.free_rows.push_back(g);
      }
    }
  }

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> t_ff, t_fp, t_pf, t_pp;
  for (int m = 0; m < M; ++m) {
    const double T = durations[static_cast<size_t>(m)];
    if (!(T > 0.0)) throw ValidationError("partitioned_quadratic: durations must be positive");
    const Eigen::MatrixXd inv = mapping_matrix_inverse(*constants, T);
    const Eigen::MatrixXd h = inv.transpose() * q_matrix(config, T) * inv;
    for (int r = 0; r < h.rows(); ++r) {
      const int gr = m * S + r;
      for (int c = 0; c < h.cols(); ++c) {
        const double v = h(r, c);
        if (v == 0.0) continue;
        const int gc = m * S + c;
        const int lr = local_index[static_cast<size_t>(gr)];
        const int lc = local_index[static_cast<size_t>(gc)];
        if (is_fixed[static_cast<size_t>(gr)]) {
          if (is_fixed[static_cast<size_t>(gc)]) {
            t_ff.emplace_back(lr, lc, v);
          } else {
            t_fp.emplace_back(lr, lc, v);
          }
        } else if (is_fixed[static_cast<size_t>(gc)]) {
          t_pf.emplace_back(lr, lc, v);
        } else {
          t_pp.emplace_back(lr, lc, v);
        }
      }
    }
  }
  const int n_f = static_cast<int>(part.fixed_rows.size());
  const int n_p = static_cast<int>(part.free_rows.size());
  part.R_FF.resize(n_f, n_f);
  part.R_FP.resize(n_f, n_p);
  part.R_PF.resize(n_p, n_f);
  part.R_PP.resize(n_p, n_p);
  part.R_FF.setFromTriplets(t_ff.begin(), t_ff.end());
  part.R_FP.setFromTriplets(t_fp.begin(), t_fp.end());
  part.R_PF.setFromTriplets(t_pf.begin(), t_pf.end());
  part.R_PP.setFromTriplets(t_pp.begin(), t_pp.end());
  return part;
}

double quadratic_energy(const PartitionedQuadratic& part,
                        const Eigen::Matrix<double, Eigen::Dynamic, 3>& fixed_values,
                        const Eigen::Matrix<double, Eigen::Dynamic, 3>& free_values) {
  if (fixed_values.rows() != static_cast<Eigen::Index>(part.fixed_rows.size()) ||
      free_values.rows() != static_cast<Eigen::Index>(part.free_rows.size())) {
    throw ValidationError("quadratic_energy: value row counts do not match the partition");
  }
  double e = (fixed_values.transpose() * (part.R_FF * fixed_values)).trace();
  e += (fixed_values.transpose() * (part.R_FP * free_values)).trace();
  e += (free_values.transpose() * (part.R_PF * fixed_values)).trace();
  e += (free_values.transpose() * (part.R_PP * free_values)).trace();
  return e;
}

Eigen::Matrix<double, Eigen::Dynamic, 3> gather_rows(
    const std::vector<WaypointDerivatives>& waypoints, bool fixed) {
  int n = 0;
  for (const auto& w : waypoints) {
    for (bool f : w.fixed) n += (f == fixed) ? 1 : 0;
  }
  Eigen::Matrix<double, Eigen::Dynamic, 3> out(n, 3);
  int row = 0;
  for (const auto& w : waypoints) {
    for (int r = 0; r < w.values.rows(); ++r) {
      if (w.fixed[static_cast<size_t>(r)] == fixed) out.row(row++) = w.values.row(r);
    }
  }
  return out;
}

}  // namespace altraj

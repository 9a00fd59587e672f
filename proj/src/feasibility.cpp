#include "altraj/feasibility.hpp"

#include <algorithm>
#include <cmath>

#include "altraj/errors.hpp"

namespace altraj {

namespace {

constexpr double kEndpointZeroRel = 1e-10;
constexpr double kTightRel = 1e-4;  // tight band, relative to constraint scale

// Value-magnitude bound of the polynomial on [0, T].
double range_scale(const UnivariatePolynomial& g, double duration) {
  double s = 0.0;
  for (auto it = g.coefficients().rbegin(); it != g.coefficients().rend(); ++it) {
    s = s * duration + std::abs(*it);
  }
  return s;
}

// Global maximum of g on [0, T]: endpoints plus interior stationary points.
double interval_maximum(const UnivariatePolynomial& g, double duration) {
  double best = std::max(g(0.0), g(duration));
  if (g.degree() >= 2) {
    const UnivariatePolynomial dg = g.derivative();
    UnivariatePolynomial square_free;
    for (const RootInterval& iv : isolate_positive_roots(dg)) {
      if (iv.lower > duration) continue;
      double r;
      try {
        r = refine_root(dg, iv, 1e-8);
      } catch (const NumericalError&) {
        // tangent stationary point (even multiplicity in dg)
        if (square_free.is_zero()) square_free = dg.square_free_part();
        try {
          r = refine_root(square_free, iv, 1e-8);
        } catch (const NumericalError&) {
          r = 0.5 * (iv.lower + std::min(iv.upper, duration));
        }
      }
      if (r > 0.0 && r < duration) best = std::max(best, g(r));
    }
  }
  return best;
}

}  // namespace

int ConstraintSpec::max_degree() const {
  int d = 0;
  for (const Term& t : terms) d = std::max(d, t.exponents[0] + t.exponents[1] + t.exponents[2]);
  return d;
}

double ConstraintSpec::scale() const {
  double s = 0.0;
  for (const Term& t : terms) s += std::abs(t.coefficient);
  return s > 0.0 ? s : 1.0;
}

ConstraintSpec builtin_speed_constraint(double v_max) {
  if (!(v_max > 0.0)) throw ValidationError("speed constraint: bound must be positive");
  ConstraintSpec spec;
  spec.derivative_order = 1;
  spec.terms = {{1.0, {2, 0, 0}}, {1.0, {0, 2, 0}}, {1.0, {0, 0, 2}}, {-v_max * v_max, {0, 0, 0}}};
  return spec;
}

ConstraintSpec builtin_accel_constraint(double a_max) {
  if (!(a_max > 0.0)) throw ValidationError("acceleration constraint: bound must be positive");
  ConstraintSpec spec = builtin_speed_constraint(a_max);
  spec.derivative_order = 2;
  return spec;
}

ConstraintSpec builtin_obstacle_constraint(const Eigen::Vector3d& center, double r_safe) {
  if (!(r_safe > 0.0)) throw ValidationError("obstacle constraint: radius must be positive");
  ConstraintSpec spec;
  spec.derivative_order = 0;
  spec.terms = {{-1.0, {2, 0, 0}}, {-1.0, {0, 2, 0}}, {-1.0, {0, 0, 2}}};
  for (int ax = 0; ax < 3; ++ax) {
    if (center[ax] != 0.0) {
      std::array<int, 3> e{0, 0, 0};
      e[static_cast<size_t>(ax)] = 1;
      spec.terms.push_back({2.0 * center[ax], e});
    }
  }
  spec.terms.push_back({r_safe * r_safe - center.squaredNorm(), {0, 0, 0}});
  return spec;
}

UnivariatePolynomial compose_constraint_polynomial(
    const ConstraintSpec& spec, const Eigen::Matrix<double, Eigen::Dynamic, 3>& coefficients,
    double duration) {
  if (!(duration > 0.0)) throw ValidationError("compose: duration must be positive");
  const int n = static_cast<int>(coefficients.rows());
  if (spec.derivative_order < 0 || spec.derivative_order >= n) {
    throw ValidationError("compose: derivative order exceeds the polynomial order");
  }
  // Per-axis derivative polynomials, then their powers up to the largest
  // exponent appearing in the term list.
  std::array<std::vector<UnivariatePolynomial>, 3> powers;
  for (int ax = 0; ax < 3; ++ax) {
    std::vector<double> c(coefficients.col(ax).data(), coefficients.col(ax).data() + n);
    UnivariatePolynomial p((std::vector<double>(c)));
    for (int i = 0; i < spec.derivative_order; ++i) p = p.derivative();
    int max_e = 0;
    for (const auto& t : spec.terms) max_e = std::max(max_e, t.exponents[static_cast<size_t>(ax)]);
    powers[static_cast<size_t>(ax)].resize(static_cast<size_t>(max_e) + 1);
    powers[static_cast<size_t>(ax)][0] = UnivariatePolynomial::constant(1.0);
    for (int e = 1; e <= max_e; ++e) {
      powers[static_cast<size_t>(ax)][static_cast<size_t>(e)] =
          powers[static_cast<size_t>(ax)][static_cast<size_t>(e - 1)] * p;
    }
  }
  std::vector<double> acc(static_cast<size_t>(spec.max_degree() * (n - 1)) + 1, 0.0);
  for (const auto& t : spec.terms) {
    int active_axes = 0;
    int single_axis = -1;
    for (int ax = 0; ax < 3; ++ax) {
      if (t.exponents[static_cast<size_t>(ax)] > 0) {
        ++active_axes;
        single_axis = ax;
      }
    }
    if (active_axes == 0) {
      acc[0] += t.coefficient;
    } else if (active_axes == 1) {
      const auto& pw = powers[static_cast<size_t>(single_axis)]
                             [static_cast<size_t>(t.exponents[static_cast<size_t>(single_axis)])];
      const auto& c = pw.coefficients();
      for (size_t k = 0; k < c.size(); ++k) acc[k] += t.coefficient * c[k];
    } else {
      UnivariatePolynomial term = UnivariatePolynomial::constant(t.coefficient);
      for (int ax = 0; ax < 3; ++ax) {
        const int e = t.exponents[static_cast<size_t>(ax)];
        if (e > 0) term = term * powers[static_cast<size_t>(ax)][static_cast<size_t>(e)];
      }
      const auto& c = term.coefficients();
      for (size_t k = 0; k < c.size(); ++k) acc[k] += c[k];
    }
  }
  return UnivariatePolynomial(std::move(acc));
}

namespace {

// One constraint on one piece. Returns feasible/infeasible and, if asked and
// feasible, whether the constraint is tight somewhere on the piece.
bool constraint_feasible(const ConstraintSpec& spec, const UnivariatePolynomial& g_effective,
                         double duration, bool compute_tightness, bool* tight) {
  UnivariatePolynomial g = g_effective;
  const double tol = kEndpointZeroRel * std::max(range_scale(g, duration), spec.scale());
  double v0 = g(0.0);
  double vT = g(duration);
  if (v0 > tol || vT > tol) return false;
  if (std::abs(v0) <= tol || std::abs(vT) <= tol) {
    // Endpoint sits on the boundary: apply the epsilon device and re-check.
    // The shift must clear the root counter's endpoint tolerance even when
    // the composed coefficients are large.
    const double shift = std::max(spec.epsilon, 100.0 * tol);
    g = g - UnivariatePolynomial::constant(shift);
    v0 = g(0.0);
    vT = g(duration);
    if (v0 >= 0.0 || vT >= 0.0) return false;
  }
  if (g.degree() >= 1) {
    try {
      if (count_roots_in_interval(g, 0.0, duration) > 0) return false;
    } catch (const NumericalError&) {
      return false;  // boundary degeneracy: err on the safe side
    }
  }
  if (compute_tightness && tight != nullptr && !*tight) {
    const double band = kTightRel * spec.scale();
    if (interval_maximum(g_effective, duration) > -band) *tight = true;
  }
  return true;
}

}  // namespace

FeasibilityVerdict check_piece(const Eigen::Matrix<double, Eigen::Dynamic, 3>& coefficients,
                               double duration, const std::vector<ConstraintSpec>& constraints,
                               bool compute_tightness) {
  if (!(duration > 0.0)) throw ValidationError("check_piece: duration must be positive");
  FeasibilityVerdict verdict;
  verdict.feasible = true;
  for (size_t i = 0; i < constraints.size(); ++i) {
    const ConstraintSpec& spec = constraints[i];
    UnivariatePolynomial g = compose_constraint_polynomial(spec, coefficients, duration);
    if (!spec.strict) g = g - UnivariatePolynomial::constant(spec.epsilon);
    if (!constraint_feasible(spec, g, duration, compute_tightness, &verdict.tight)) {
      verdict.feasible = false;
      verdict.tight = false;
      verdict.violated_constraint = static_cast<int>(i);
      return verdict;
    }
  }
  return verdict;
}

std::vector<FeasibilityVerdict> check_trajectory(const Trajectory& traj,
                                                 const std::vector<ConstraintSpec>& constraints,
                                                 bool compute_tightness) {
  std::vector<FeasibilityVerdict> verdicts;
  verdicts.reserve(static_cast<size_t>(traj.piece_count()));
  for (int m = 0; m < traj.piece_count(); ++m) {
    verdicts.push_back(check_piece(traj.coefficients(m), traj.durations()[static_cast<size_t>(m)],
                                   constraints, compute_tightness));
  }
  return verdicts;
}

bool all_feasible(const std::vector<FeasibilityVerdict>& verdicts) {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const FeasibilityVerdict& v) { return v.feasible; });
}

}  // namespace altraj

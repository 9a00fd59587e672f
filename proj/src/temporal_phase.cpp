#include "altraj/temporal_phase.hpp"

#include <algorithm>
#include <vector>

#include "altraj/errors.hpp"

namespace altraj {

namespace {

constexpr double kRefineTol = 1e-10;  // relative in T

}  // namespace

UnivariatePolynomial stationarity_polynomial(const RationalCost& rc, double rho) {
  const int p_n = rc.numerator_shift;
  const int p_d = rc.degree;
  std::vector<double> c(static_cast<size_t>(std::max(p_n + 1, p_d)) + 1, 0.0);
  c[static_cast<size_t>(p_n) + 1] += rho;
  for (int i = 0; i <= p_d; ++i) {
    c[static_cast<size_t>(i)] += static_cast<double>(i - p_n) * rc.alpha[static_cast<size_t>(i)];
  }
  return UnivariatePolynomial(std::move(c));
}

std::vector<double> stationary_durations(const RationalCost& rc, double rho) {
  const UnivariatePolynomial sp = stationarity_polynomial(rc, rho);
  std::vector<double> roots;
  if (sp.is_zero() || sp.degree() < 1) return roots;
  UnivariatePolynomial square_free;  // built lazily on the first tangency
  for (const RootInterval& iv : isolate_positive_roots(sp)) {
    double r;
    try {
      r = refine_root(sp, iv, kRefineTol);
    } catch (const NumericalError&) {
      // even-multiplicity root (tangent stationary point); refine on the
      // square-free part, which crosses zero there
      if (square_free.is_zero()) square_free = sp.square_free_part();
      r = refine_root(square_free, iv, kRefineTol);
    }
    if (r > 0.0) roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

namespace {

double best_duration(const RationalCost& rc, double rho, const std::vector<double>& candidates) {
  double best_t = 0.0;
  double best_j = 0.0;
  bool have = false;
  for (double t : candidates) {
    const double j = rc.evaluate(t, rho);
    // ties broken toward the smaller duration (candidates are ascending)
    if (!have || j < best_j) {
      best_t = t;
      best_j = j;
      have = true;
    }
  }
  if (!have) {
    throw NumericalError("temporal phase: no stationary duration (degenerate boundary data)");
  }
  return best_t;
}

}  // namespace

double optimal_piece_duration(const BoundaryCondition& bc, const ObjectiveConfig& config) {
  return optimal_piece_duration(bc, config, RationalCostExpander(config));
}

double optimal_piece_duration(const BoundaryCondition& bc, const ObjectiveConfig& config,
                              const RationalCostExpander& expander) {
  const RationalCost rc = expander.expand(bc);
  return best_duration(rc, config.rho, stationary_durations(rc, config.rho));
}

}  // namespace altraj

#include "altraj/univar_roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "altraj/errors.hpp"

namespace altraj {

namespace {

constexpr double kTrimRel = 1e-12;
constexpr double kSignZeroRel = 1e-12;
constexpr double kEndpointRootRel = 1e-10;

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

UnivariatePolynomial::UnivariatePolynomial(std::vector<double> coefficients)
    : coefficients_(std::move(coefficients)) {
  trim();
}

UnivariatePolynomial UnivariatePolynomial::constant(double value) {
  return UnivariatePolynomial(std::vector<double>{value});
}

void UnivariatePolynomial::trim() {
  double scale = 0.0;
  for (double c : coefficients_) scale = std::max(scale, std::abs(c));
  const double tol = kTrimRel * scale;
  while (!coefficients_.empty() && std::abs(coefficients_.back()) <= tol) {
    coefficients_.pop_back();
  }
}

double UnivariatePolynomial::coefficient(int k) const {
  if (k < 0 || k >= static_cast<int>(coefficients_.size())) return 0.0;
  return coefficients_[static_cast<size_t>(k)];
}

double UnivariatePolynomial::leading_coefficient() const {
  return coefficients_.empty() ? 0.0 : coefficients_.back();
}

double UnivariatePolynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (double c : coefficients_) m = std::max(m, std::abs(c));
  return m;
}

double UnivariatePolynomial::operator()(double t) const {
  double v = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
    v = v * t + *it;
  }
  return v;
}

double UnivariatePolynomial::evaluate_with_scale(double t, double* scale) const {
  double v = 0.0, s = 0.0;
  const double at = std::abs(t);
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
    v = v * t + *it;
    s = s * at + std::abs(*it);
  }
  if (scale != nullptr) *scale = s;
  return v;
}

UnivariatePolynomial UnivariatePolynomial::derivative() const {
  if (coefficients_.size() <= 1) return UnivariatePolynomial();
  std::vector<double> d(coefficients_.size() - 1);
  for (size_t k = 1; k < coefficients_.size(); ++k) {
    d[k - 1] = static_cast<double>(k) * coefficients_[k];
  }
  return UnivariatePolynomial(std::move(d));
}

UnivariatePolynomial UnivariatePolynomial::deflate_origin_root() const {
  if (coefficients_.empty()) return UnivariatePolynomial();
  if (std::abs(coefficients_.front()) > kTrimRel * max_abs_coefficient()) {
    throw NumericalError("deflate_origin_root: constant term is not zero");
  }
  std::vector<double> d(coefficients_.begin() + 1, coefficients_.end());
  return UnivariatePolynomial(std::move(d));
}

UnivariatePolynomial UnivariatePolynomial::normalized() const {
  const double m = max_abs_coefficient();
  if (m == 0.0) return *this;
  std::vector<double> c = coefficients_;
  for (double& x : c) x /= m;
  return UnivariatePolynomial(std::move(c));
}

void UnivariatePolynomial::negate_and_normalize_in_place() {
  const double m = max_abs_coefficient();
  if (m == 0.0) return;
  for (double& x : coefficients_) x = -x / m;
}

UnivariatePolynomial UnivariatePolynomial::operator+(const UnivariatePolynomial& rhs) const {
  std::vector<double> c(std::max(coefficients_.size(), rhs.coefficients_.size()), 0.0);
  for (size_t k = 0; k < coefficients_.size(); ++k) c[k] += coefficients_[k];
  for (size_t k = 0; k < rhs.coefficients_.size(); ++k) c[k] += rhs.coefficients_[k];
  return UnivariatePolynomial(std::move(c));
}

UnivariatePolynomial UnivariatePolynomial::operator-(const UnivariatePolynomial& rhs) const {
  std::vector<double> c(std::max(coefficients_.size(), rhs.coefficients_.size()), 0.0);
  for (size_t k = 0; k < coefficients_.size(); ++k) c[k] += coefficients_[k];
  for (size_t k = 0; k < rhs.coefficients_.size(); ++k) c[k] -= rhs.coefficients_[k];
  return UnivariatePolynomial(std::move(c));
}

UnivariatePolynomial UnivariatePolynomial::operator*(const UnivariatePolynomial& rhs) const {
  if (is_zero() || rhs.is_zero()) return UnivariatePolynomial();
  std::vector<double> c(coefficients_.size() + rhs.coefficients_.size() - 1, 0.0);
  for (size_t i = 0; i < coefficients_.size(); ++i) {
    for (size_t j = 0; j < rhs.coefficients_.size(); ++j) {
      c[i + j] += coefficients_[i] * rhs.coefficients_[j];
    }
  }
  return UnivariatePolynomial(std::move(c));
}

UnivariatePolynomial UnivariatePolynomial::operator*(double s) const {
  std::vector<double> c = coefficients_;
  for (double& x : c) x *= s;
  return UnivariatePolynomial(std::move(c));
}

void UnivariatePolynomial::divide(const UnivariatePolynomial& divisor,
                                  UnivariatePolynomial* quotient,
                                  UnivariatePolynomial* remainder) const {
  if (divisor.is_zero()) throw ValidationError("polynomial division by zero");
  const int da = degree();
  const int db = divisor.degree();
  if (da < db) {
    if (quotient != nullptr) *quotient = UnivariatePolynomial();
    if (remainder != nullptr) *remainder = *this;
    return;
  }
  std::vector<double> r = coefficients_;
  std::vector<double> q;
  if (quotient != nullptr) q.assign(static_cast<size_t>(da - db) + 1, 0.0);
  const double lead = divisor.coefficients_[static_cast<size_t>(db)];
  for (int k = da - db; k >= 0; --k) {
    const double f = r[static_cast<size_t>(db + k)] / lead;
    if (quotient != nullptr) q[static_cast<size_t>(k)] = f;
    r[static_cast<size_t>(db + k)] = 0.0;
    for (int j = 0; j < db; ++j) {
      r[static_cast<size_t>(j + k)] -= f * divisor.coefficients_[static_cast<size_t>(j)];
    }
  }
  r.resize(static_cast<size_t>(std::max(db, 0)));
  if (quotient != nullptr) *quotient = UnivariatePolynomial(std::move(q));
  if (remainder != nullptr) *remainder = UnivariatePolynomial(std::move(r));
}

UnivariatePolynomial UnivariatePolynomial::square_free_part() const {
  if (is_zero()) throw ValidationError("square_free_part of zero polynomial");
  if (degree() <= 1) return *this;
  // Euclidean gcd(p, p') on normalized operands; remainders that fall below
  // the trim threshold count as zero.
  UnivariatePolynomial a = normalized();
  UnivariatePolynomial b = a.derivative().normalized();
  while (!b.is_zero() && b.degree() >= 1) {
    UnivariatePolynomial rem;
    a.divide(b, nullptr, &rem);
    a = b;
    b = rem.normalized();
  }
  if (!b.is_zero()) return *this;  // gcd is constant: already square-free
  UnivariatePolynomial q;
  this->normalized().divide(a, &q, nullptr);
  return q;
}

SturmSequence sturm_sequence(const UnivariatePolynomial& p) {
  if (p.is_zero()) throw ValidationError("sturm_sequence of zero polynomial");
  SturmSequence seq;
  seq.polys.reserve(static_cast<size_t>(p.degree()) + 2);
  seq.polys.push_back(p.normalized());
  if (p.degree() == 0) return seq;
  seq.polys.push_back(p.derivative().normalized());
  while (seq.polys.back().degree() >= 1) {
    const UnivariatePolynomial& g_prev = seq.polys[seq.polys.size() - 2];
    const UnivariatePolynomial& g_last = seq.polys.back();
    UnivariatePolynomial rem;
    g_prev.divide(g_last, nullptr, &rem);
    if (rem.is_zero()) {
      seq.degenerate = true;  // g_last is a nonconstant gcd: repeated roots
      break;
    }
    rem.negate_and_normalize_in_place();
    seq.polys.push_back(std::move(rem));
  }
  return seq;
}

int sign_variations(const SturmSequence& seq, double t) {
  int variations = 0;
  int last_sign = 0;
  for (const UnivariatePolynomial& g : seq.polys) {
    double scale = 0.0;
    const double v = g.evaluate_with_scale(t, &scale);
    if (std::abs(v) <= kSignZeroRel * scale) continue;  // zeros are skipped
    const int s = sign_of(v);
    if (last_sign != 0 && s != last_sign) ++variations;
    last_sign = s;
  }
  return variations;
}

int count_roots_in_interval(const UnivariatePolynomial& p, double a, double b) {
  if (p.is_zero()) throw ValidationError("count_roots_in_interval: zero polynomial");
  if (!(a < b)) throw ValidationError("count_roots_in_interval: requires a < b");
  double scale_a = 0.0, scale_b = 0.0;
  const double va = p.evaluate_with_scale(a, &scale_a);
  const double vb = p.evaluate_with_scale(b, &scale_b);
  if (std::abs(va) <= kEndpointRootRel * scale_a ||
      std::abs(vb) <= kEndpointRootRel * scale_b) {
    throw NumericalError("count_roots_in_interval: endpoint is a root");
  }
  SturmSequence seq = sturm_sequence(p);
  if (seq.degenerate) {
    seq = sturm_sequence(p.square_free_part());
    if (seq.degenerate) {
      throw NumericalError("count_roots_in_interval: square-free reduction failed");
    }
  }
  return sign_variations(seq, a) - sign_variations(seq, b);
}

namespace {

// Upper bound on the positive real roots (Cauchy bound).
double cauchy_root_bound(const UnivariatePolynomial& p) {
  const auto& c = p.coefficients();
  const int n = p.degree();
  if (n <= 0) return 0.0;
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(c[static_cast<size_t>(i)]));
  return 1.0 + m / std::abs(c[static_cast<size_t>(n)]);
}

std::vector<double> reversed_coefficients(const std::vector<double>& c) {
  return std::vector<double>(c.rbegin(), c.rend());
}

// Lower bound on positive roots: 1 / (Cauchy bound of x^n p(1/x)).
double positive_root_lower_bound(const UnivariatePolynomial& p) {
  UnivariatePolynomial rev(reversed_coefficients(p.coefficients()));
  if (rev.degree() <= 0) return 0.0;
  const double ub = cauchy_root_bound(rev);
  return ub > 0.0 ? 1.0 / ub : 0.0;
}

int coefficient_sign_variations(const UnivariatePolynomial& p) {
  const double tol = 1e-14 * p.max_abs_coefficient();
  int variations = 0, last_sign = 0;
  for (double c : p.coefficients()) {
    if (std::abs(c) <= tol) continue;
    const int s = sign_of(c);
    if (last_sign != 0 && s != last_sign) ++variations;
    last_sign = s;
  }
  return variations;
}

// p(x + s) via repeated synthetic (Ruffini-Horner) addition.
UnivariatePolynomial taylor_shift(const UnivariatePolynomial& p, double s) {
  std::vector<double> c = p.coefficients();
  const int n = static_cast<int>(c.size());
  for (int i = 0; i < n - 1; ++i) {
    for (int j = n - 2; j >= i; --j) {
      c[static_cast<size_t>(j)] += s * c[static_cast<size_t>(j + 1)];
    }
  }
  return UnivariatePolynomial(std::move(c));
}

// Mobius map x -> (a x + b) / (c x + d) from the transformed variable back
// to the original one; tracks the image of (0, +inf).
struct Mobius {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  double at_zero() const { return b / d; }
  bool unbounded() const { return c == 0.0; }
  double at_infinity() const { return a / c; }
  Mobius shifted(double s) const { return {a, a * s + b, c, c * s + d}; }
  // x -> 1 / (1 + x)
  Mobius inverted_unit() const { return {b, a + b, d, c + d}; }
};

struct VasContext {
  double upper_bound = 0.0;
  std::vector<RootInterval> out;
};

RootInterval clipped_interval(const Mobius& m, double upper_bound) {
  const double e0 = m.at_zero();
  const double e1 = m.unbounded() ? upper_bound : m.at_infinity();
  RootInterval iv{std::min(e0, e1), std::max(e0, e1)};
  iv.lower = std::max(iv.lower, 0.0);
  iv.upper = std::min(iv.upper, upper_bound);
  return iv;
}

// Sturm-bisection fallback for the (rare) case the VAS recursion depth cap
// trips on a numerically awkward input.
void bisection_isolate(const UnivariatePolynomial& p, double lo, double hi,
                       VasContext* ctx, int depth) {
  auto safe_count = [&](double a, double b) {
    // nudge endpoints off roots if needed
    const double w = b - a;
    for (int k = 0; k < 8; ++k) {
      try {
        return count_roots_in_interval(p, a, b);
      } catch (const NumericalError&) {
        a -= 1e-9 * w + 1e-12;
        b += 1e-9 * w + 1e-12;
      }
    }
    return 0;
  };
  const int n = safe_count(lo, hi);
  if (n == 0) return;
  if (n == 1 || depth > 80) {
    ctx->out.push_back({std::max(lo, 0.0), hi});
    return;
  }
  const double mid = 0.5 * (lo + hi);
  bisection_isolate(p, lo, mid, ctx, depth + 1);
  bisection_isolate(p, mid, hi, ctx, depth + 1);
}

// A transformed constant term that is tiny relative to the other
// coefficients marks a root at the image of x = 0 (branch boundaries land
// there after Taylor shifts, with rounding residue instead of exact zeros).
// Deflates it away; emits the point root unless the sibling branch already
// owns that boundary.
void strip_boundary_root(UnivariatePolynomial* p, const Mobius& m, VasContext* ctx, bool emit) {
  bool emitted = !emit;
  while (p->degree() >= 1 &&
         std::abs(p->coefficient(0)) <= 1e-14 * p->max_abs_coefficient()) {
    if (!emitted) {
      const double r = m.at_zero();
      if (r > 0.0 && r <= ctx->upper_bound) ctx->out.push_back({r, r});
      emitted = true;
    }
    std::vector<double> c(p->coefficients().begin() + 1, p->coefficients().end());
    *p = UnivariatePolynomial(std::move(c));
  }
}

void vas_recurse(UnivariatePolynomial p, Mobius m, VasContext* ctx, int depth) {
  if (p.is_zero()) return;
  strip_boundary_root(&p, m, ctx, /*emit=*/true);
  if (p.degree() <= 0) return;
  const int v = coefficient_sign_variations(p);
  if (v == 0) return;
  if (v == 1) {
    const RootInterval iv = clipped_interval(m, ctx->upper_bound);
    if (iv.upper > 0.0) ctx->out.push_back(iv);
    return;
  }
  if (depth > 64) {
    const RootInterval iv = clipped_interval(m, ctx->upper_bound);
    bisection_isolate(p, iv.lower, iv.upper, ctx, 0);
    return;
  }
  // Skip the root-free prefix of the axis when the lower bound allows it.
  const double lb = positive_root_lower_bound(p);
  if (lb >= 1.0) {
    const double s = std::floor(lb);
    p = taylor_shift(p, s);
    m = m.shifted(s);
    strip_boundary_root(&p, m, ctx, /*emit=*/true);
    if (p.degree() <= 0) return;
  }
  // Roots in (1, inf): shift by one.
  UnivariatePolynomial p1 = taylor_shift(p, 1.0);
  Mobius m1 = m.shifted(1.0);
  // Roots in (0, 1): x -> 1/(1+x), realized as reverse-then-shift. A root
  // exactly at the split point belongs to the shifted branch; drop it here
  // so it is reported once.
  UnivariatePolynomial p0 =
      taylor_shift(UnivariatePolynomial(reversed_coefficients(p.coefficients())), 1.0);
  Mobius m0 = m.inverted_unit();
  strip_boundary_root(&p0, m0, ctx, /*emit=*/false);
  vas_recurse(std::move(p0), m0, ctx, depth + 1);
  vas_recurse(std::move(p1), m1, ctx, depth + 1);
}

// Nudges an endpoint of an isolating interval off a root of p (the branch
// boundaries of the recursion can coincide with roots reported as point
// intervals). Walks inward with shrinking steps until the value is sign-
// definite on the correct side.
double definite_endpoint(const UnivariatePolynomial& p, double endpoint, double other,
                         double opposite_value) {
  double scale = 0.0;
  const double v = p.evaluate_with_scale(endpoint, &scale);
  if (std::abs(v) > 1e-12 * scale) return endpoint;
  const double width = other - endpoint;
  for (int k = 2; k < 64; ++k) {
    const double candidate = endpoint + width * std::ldexp(1.0, -k);
    const double value = p.evaluate_with_scale(candidate, &scale);
    if (std::abs(value) > 1e-12 * scale && (value > 0.0) != (opposite_value > 0.0)) {
      return candidate;
    }
  }
  return endpoint;
}

}  // namespace

std::vector<RootInterval> isolate_positive_roots(const UnivariatePolynomial& p) {
  if (p.is_zero()) throw ValidationError("isolate_positive_roots of zero polynomial");
  if (p.degree() == 0) return {};
  UnivariatePolynomial work = p.square_free_part().normalized();
  // Strip roots at the origin; they are not positive.
  while (!work.is_zero() && work.degree() >= 1 &&
         std::abs(work.coefficient(0)) <= kTrimRel * work.max_abs_coefficient()) {
    work = work.deflate_origin_root();
  }
  if (work.degree() <= 0) return {};
  VasContext ctx;
  ctx.upper_bound = cauchy_root_bound(work);
  vas_recurse(work, Mobius{}, &ctx, 0);
  // Endpoints of open intervals may sit exactly on neighboring roots of the
  // caller's polynomial (origin roots, branch boundaries); walk them inward
  // against the original input so refinement sees a clean bracket.
  for (RootInterval& iv : ctx.out) {
    if (iv.is_point()) continue;
    iv.lower = definite_endpoint(p, iv.lower, iv.upper, p(iv.upper));
    iv.upper = definite_endpoint(p, iv.upper, iv.lower, p(iv.lower));
  }
  std::sort(ctx.out.begin(), ctx.out.end(),
            [](const RootInterval& x, const RootInterval& y) { return x.lower < y.lower; });
  return ctx.out;
}

double refine_root(const UnivariatePolynomial& p, const RootInterval& interval, double tol) {
  if (p.is_zero()) throw ValidationError("refine_root of zero polynomial");
  if (interval.is_point()) return interval.lower;
  double lo = interval.lower, hi = interval.upper;
  double scale_lo = 0.0, scale_hi = 0.0;
  double f_lo = p.evaluate_with_scale(lo, &scale_lo);
  double f_hi = p.evaluate_with_scale(hi, &scale_hi);
  if (std::abs(f_lo) <= kEndpointRootRel * scale_lo) return lo;
  if (std::abs(f_hi) <= kEndpointRootRel * scale_hi) return hi;
  if (sign_of(f_lo) == sign_of(f_hi)) {
    throw NumericalError("refine_root: no sign change across isolating interval");
  }
  for (int it = 0; it < 200 && hi - lo > tol * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = p(mid);
    if (f_mid == 0.0) return mid;
    if (sign_of(f_mid) == sign_of(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  // Newton polish inside the final bracket.
  const UnivariatePolynomial dp = p.derivative();
  double x = 0.5 * (lo + hi);
  double best = x, best_abs = std::abs(p(x));
  for (int it = 0; it < 4; ++it) {
    const double d = dp(x);
    if (d == 0.0) break;
    x -= p(x) / d;
    if (x < lo || x > hi) break;
    const double ax = std::abs(p(x));
    if (ax < best_abs) {
      best = x;
      best_abs = ax;
    }
  }
  return best;
}

}  // namespace altraj

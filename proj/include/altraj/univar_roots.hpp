#pragma once

#include <vector>

namespace altraj {

/// Real-coefficient univariate polynomial, coefficients stored in ascending
/// powers (entry k multiplies t^k). Trailing coefficients below
/// 1e-12 * max|coeff| are trimmed at construction; the zero polynomial is
/// representable as an empty coefficient vector.
class UnivariatePolynomial {
 public:
  UnivariatePolynomial() = default;
  explicit UnivariatePolynomial(std::vector<double> coefficients);
  static UnivariatePolynomial constant(double value);

  bool is_zero() const { return coefficients_.empty(); }
  /// Degree of the polynomial; -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  double coefficient(int k) const;
  double leading_coefficient() const;
  double max_abs_coefficient() const;

  /// Horner evaluation.
  double operator()(double t) const;
  /// Evaluation that also reports sum_k |c_k| |t|^k, the natural magnitude
  /// scale for deciding whether the value is numerically zero.
  double evaluate_with_scale(double t, double* scale) const;

  UnivariatePolynomial derivative() const;
  /// Divides out a factor of t (requires |constant term| within trim
  /// tolerance of zero).
  UnivariatePolynomial deflate_origin_root() const;
  /// Coefficients divided by max|coeff|; zero polynomial unchanged.
  UnivariatePolynomial normalized() const;
  /// Negates and rescales to unit max-coefficient without reallocating.
  void negate_and_normalize_in_place();

  UnivariatePolynomial operator+(const UnivariatePolynomial& rhs) const;
  UnivariatePolynomial operator-(const UnivariatePolynomial& rhs) const;
  UnivariatePolynomial operator*(const UnivariatePolynomial& rhs) const;
  UnivariatePolynomial operator*(double s) const;

  /// Euclidean division: *this = q * divisor + r with deg r < deg divisor.
  /// Near-zero leading coefficients produced by cancellation are trimmed.
  void divide(const UnivariatePolynomial& divisor, UnivariatePolynomial* quotient,
              UnivariatePolynomial* remainder) const;

  /// p / gcd(p, p'): same distinct roots, all simple.
  UnivariatePolynomial square_free_part() const;

 private:
  void trim();
  std::vector<double> coefficients_;
};

/// The signed Euclidean remainder chain g0 = p, g1 = p',
/// g_{k+1} = -Rem(g_{k-1}, g_k), each member scaled to unit max-coefficient.
/// Ends at a constant, or earlier when a remainder vanishes identically
/// (repeated roots; the last member is then a nonconstant gcd).
struct SturmSequence {
  std::vector<UnivariatePolynomial> polys;
  bool degenerate = false;  // chain stopped before reaching a constant
};

SturmSequence sturm_sequence(const UnivariatePolynomial& p);

/// Sign variations of the sequence evaluated at t, zeros skipped
/// (|value| <= 1e-12 * local evaluation scale counts as zero).
int sign_variations(const SturmSequence& seq, double t);

/// Number of distinct real roots in the open interval (a, b), via
/// V_sign(a) - V_sign(b). Falls back to the square-free part when the chain
/// degenerates. Throws NumericalError when an endpoint is a root
/// (relative tolerance 1e-10).
int count_roots_in_interval(const UnivariatePolynomial& p, double a, double b);

struct RootInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool is_point() const { return lower == upper; }
};

/// Isolates all distinct positive real roots with the continued-fraction
/// (Vincent-Akritas-Strzebonski) method: disjoint intervals, one root each,
/// bounded above by the Cauchy root bound, sorted ascending.
std::vector<RootInterval> isolate_positive_roots(const UnivariatePolynomial& p);

/// Refines an isolating interval to a root. tol is a relative width target;
/// bisection on the sign change guarantees convergence and a final Newton
/// polish sharpens the result. Throws NumericalError when the interval
/// carries no sign change and neither endpoint is a root.
double refine_root(const UnivariatePolynomial& p, const RootInterval& interval, double tol);

}  // namespace altraj

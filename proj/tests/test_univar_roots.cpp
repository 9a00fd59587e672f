#include "altraj/univar_roots.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "altraj/errors.hpp"
#include "doctest.h"

namespace {

using altraj::NumericalError;
using altraj::RootInterval;
using altraj::UnivariatePolynomial;
using altraj::ValidationError;

UnivariatePolynomial poly(std::vector<double> c) { return UnivariatePolynomial(std::move(c)); }

// Independent root-count oracle: dense sampling with sign changes.
int sampled_sign_changes(const UnivariatePolynomial& p, double a, double b, int samples) {
  int changes = 0;
  double prev = p(a);
  for (int i = 1; i <= samples; ++i) {
    const double t = a + (b - a) * static_cast<double>(i) / samples;
    const double v = p(t);
    if (prev != 0.0 && v != 0.0 && (prev < 0) != (v < 0)) ++changes;
    if (v != 0.0) prev = v;
  }
  return changes;
}

// Polynomial with the given real roots (ascending coefficient convolution).
UnivariatePolynomial from_roots(const std::vector<double>& roots) {
  std::vector<double> c{1.0};
  for (double r : roots) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  return UnivariatePolynomial(std::move(c));
}

}  // namespace

TEST_CASE("polynomial basics: trim, degree, evaluation") {
  const auto p = poly({2.0, -3.0, 1.0});  // t^2 - 3t + 2
  CHECK(p.degree() == 2);
  CHECK(p(0.0) == doctest::Approx(2.0));
  CHECK(p(1.0) == doctest::Approx(0.0));
  CHECK(p(3.0) == doctest::Approx(2.0));

  const auto trimmed = poly({1.0, 2.0, 1e-15});
  CHECK(trimmed.degree() == 1);

  CHECK(UnivariatePolynomial().is_zero());
  CHECK(UnivariatePolynomial().degree() == -1);

  const auto d = p.derivative();
  CHECK(d.degree() == 1);
  CHECK(d(0.0) == doctest::Approx(-3.0));
  CHECK(d(1.0) == doctest::Approx(-1.0));
}

TEST_CASE("polynomial division") {
  const auto a = poly({2.0, -3.0, 1.0});
  const auto b = poly({-3.0, 2.0});  // 2t - 3
  UnivariatePolynomial q, r;
  a.divide(b, &q, &r);
  CHECK(r.degree() == 0);
  CHECK(r(0.0) == doctest::Approx(-0.25));
  // a = q*b + r
  for (double t : {-1.0, 0.0, 0.7, 2.5}) {
    CHECK(q(t) * b(t) + r(t) == doctest::Approx(a(t)));
  }
}

TEST_CASE("sturm sequence of t^2 - 3t + 2") {
  const auto seq = altraj::sturm_sequence(poly({2.0, -3.0, 1.0}));
  REQUIRE(seq.polys.size() == 3);
  CHECK(!seq.degenerate);
  // chain members are normalized; compare up to positive scale
  CHECK(seq.polys[0].degree() == 2);
  CHECK(seq.polys[1].degree() == 1);
  CHECK(seq.polys[2].degree() == 0);
  CHECK(seq.polys[2](0.0) > 0.0);  // 0.25 up to scale

  CHECK(altraj::sign_variations(seq, 0.0) == 2);
  CHECK(altraj::sign_variations(seq, 3.0) == 0);
  // at the midpoint between the roots the middle member vanishes: skipped
  CHECK(altraj::sign_variations(seq, 1.5) == 1);
}

TEST_CASE("sturm sequence edge cases") {
  const auto constant = altraj::sturm_sequence(poly({5.0}));
  CHECK(constant.polys.size() == 1);

  // (t-1)^2: remainder vanishes, chain stops after two members
  const auto repeated = altraj::sturm_sequence(poly({1.0, -2.0, 1.0}));
  CHECK(repeated.polys.size() == 2);
  CHECK(repeated.degenerate);

  CHECK_THROWS_AS(altraj::sturm_sequence(UnivariatePolynomial()), ValidationError);
}

TEST_CASE("count_roots_in_interval") {
  const auto p = poly({2.0, -3.0, 1.0});
  CHECK(altraj::count_roots_in_interval(p, 0.0, 3.0) == 2);
  CHECK(altraj::count_roots_in_interval(p, 0.0, 1.5) == 1);
  CHECK(altraj::count_roots_in_interval(poly({1.0, 0.0, 1.0}), -10.0, 10.0) == 0);
  // endpoint is a root
  CHECK_THROWS_AS(altraj::count_roots_in_interval(p, 1.0, 3.0), NumericalError);
  // repeated roots handled through the square-free part
  CHECK(altraj::count_roots_in_interval(poly({1.0, -2.0, 1.0}), 0.0, 2.0) == 1);
}

TEST_CASE("isolate_positive_roots basic cases") {
  // (t-1)(t-2)(t+3) = t^3 - 7t + 6
  const auto p = poly({6.0, -7.0, 0.0, 1.0});
  const auto intervals = altraj::isolate_positive_roots(p);
  REQUIRE(intervals.size() == 2);
  CHECK(intervals[0].lower <= 1.0);
  CHECK(intervals[0].upper >= 1.0);
  CHECK(intervals[1].lower <= 2.0);
  CHECK(intervals[1].upper >= 2.0);
  CHECK(intervals[0].upper <= intervals[1].lower + 1e-12);

  CHECK(altraj::isolate_positive_roots(poly({1.0, 0.0, 1.0})).empty());

  const auto linear = altraj::isolate_positive_roots(poly({-5.0, 1.0}));
  REQUIRE(linear.size() == 1);
  CHECK(linear[0].lower <= 5.0);
  CHECK(linear[0].upper >= 5.0);
}

TEST_CASE("refine_root") {
  const auto sqrt2 = altraj::refine_root(poly({-2.0, 0.0, 1.0}), {1.0, 2.0}, 1e-10);
  CHECK(sqrt2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

  CHECK(altraj::refine_root(poly({-5.0, 1.0}), {4.0, 6.0}, 1e-10) == doctest::Approx(5.0));

  const auto cubic = poly({6.0, -7.0, 0.0, 1.0});
  const auto intervals = altraj::isolate_positive_roots(cubic);
  REQUIRE(intervals.size() == 2);
  CHECK(altraj::refine_root(cubic, intervals[1], 1e-10) == doctest::Approx(2.0).epsilon(1e-10));

  CHECK_THROWS_AS(altraj::refine_root(poly({1.0, 0.0, 1.0}), {0.5, 2.0}, 1e-10), NumericalError);
}

TEST_CASE("root count agrees with the dense sampling oracle") {
  std::mt19937 rng(20240917);
  std::uniform_real_distribution<double> root_dist(-2.0, 12.0);
  std::uniform_int_distribution<int> degree_dist(1, 10);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int degree = degree_dist(rng);
    std::vector<double> roots;
    for (int i = 0; i < degree; ++i) roots.push_back(root_dist(rng));
    std::sort(roots.begin(), roots.end());
    // keep the constructed roots well separated and off the endpoints
    bool ok = true;
    for (size_t i = 0; i + 1 < roots.size(); ++i) {
      ok = ok && roots[i + 1] - roots[i] > 1e-3;
    }
    for (double r : roots) {
      ok = ok && std::abs(r) > 5e-2 && std::abs(r - 10.0) > 5e-2;
    }
    if (!ok) continue;
    ++checked;
    const auto p = from_roots(roots);
    const int expected = sampled_sign_changes(p, 0.0, 10.0, 1'000'000);
    CHECK(altraj::count_roots_in_interval(p, 0.0, 10.0) == expected);
  }
  CHECK(checked > 400);
}

TEST_CASE("isolation plus refinement recovers constructed positive roots") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> root_dist(0.05, 9.0);
  std::uniform_int_distribution<int> count_dist(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> roots;
    const int n = count_dist(rng);
    for (int i = 0; i < n; ++i) roots.push_back(root_dist(rng));
    std::sort(roots.begin(), roots.end());
    bool ok = true;
    for (size_t i = 0; i + 1 < roots.size(); ++i) ok = ok && roots[i + 1] - roots[i] > 1e-2;
    if (!ok) continue;
    auto p = from_roots(roots);
    // a negative root keeps the sign pattern interesting
    p = p * poly({3.0, 1.0});
    const auto intervals = altraj::isolate_positive_roots(p);
    REQUIRE(intervals.size() == roots.size());
    for (size_t i = 0; i < roots.size(); ++i) {
      const double refined = altraj::refine_root(p, intervals[i], 1e-12);
      CHECK(refined == doctest::Approx(roots[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("square-free sturm chain has no consecutive zero evaluations") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> c(7);
    for (double& x : c) x = coeff(rng);
    c.back() = c.back() < 0 ? c.back() - 0.5 : c.back() + 0.5;
    const auto seq = altraj::sturm_sequence(poly(std::move(c)));
    if (seq.degenerate) continue;
    std::uniform_real_distribution<double> where(-3.0, 3.0);
    for (int s = 0; s < 20; ++s) {
      const double t = where(rng);
      int consecutive = 0;
      for (const auto& g : seq.polys) {
        double scale = 0.0;
        const double v = g.evaluate_with_scale(t, &scale);
        if (std::abs(v) <= 1e-12 * scale) {
          ++consecutive;
          CHECK(consecutive < 2);
        } else {
          consecutive = 0;
        }
      }
    }
  }
}

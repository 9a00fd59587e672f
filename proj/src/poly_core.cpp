#include "altraj/poly_core.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <vector>

#include "altraj/errors.hpp"

namespace altraj {

namespace {

// Exact rational scalar over 128-bit integers; wide enough for the Gauss-
// Jordan elimination of G up to order 11.
struct Fraction {
  __int128 num = 0;
  __int128 den = 1;

  Fraction() = default;
  Fraction(long long n) : num(n), den(1) {}
  Fraction(__int128 n, __int128 d) : num(n), den(d) { reduce(); }

  void reduce() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      num /= a;
      den /= a;
    }
  }

  Fraction operator+(const Fraction& o) const { return {num * o.den + o.num * den, den * o.den}; }
  Fraction operator-(const Fraction& o) const { return {num * o.den - o.num * den, den * o.den}; }
  Fraction operator*(const Fraction& o) const { return {num * o.num, den * o.den}; }
  Fraction operator/(const Fraction& o) const { return {num * o.den, den * o.num}; }
  bool is_zero() const { return num == 0; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

using FractionMatrix = std::vector<std::vector<Fraction>>;

FractionMatrix identity_fractions(int n) {
  FractionMatrix m(n, std::vector<Fraction>(n));
  for (int i = 0; i < n; ++i) m[i][i] = Fraction(1);
  return m;
}

// Gauss-Jordan over rationals; the input matrices are tiny and integer.
FractionMatrix invert_fractions(FractionMatrix a) {
  const int n = static_cast<int>(a.size());
  FractionMatrix inv = identity_fractions(n);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (!a[r][col].is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw NumericalError("mapping constants: singular G matrix");
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const Fraction p = a[col][col];
    for (int c = 0; c < n; ++c) {
      a[col][c] = a[col][c] / p;
      inv[col][c] = inv[col][c] / p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      const Fraction f = a[r][col];
      for (int c = 0; c < n; ++c) {
        a[r][c] = a[r][c] - f * a[col][c];
        inv[r][c] = inv[r][c] - f * inv[col][c];
      }
    }
  }
  return inv;
}

FractionMatrix multiply(const FractionMatrix& a, const FractionMatrix& b) {
  const int n = static_cast<int>(a.size());
  FractionMatrix c(n, std::vector<Fraction>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Fraction s(0);
      for (int k = 0; k < n; ++k) s = s + a[i][k] * b[k][j];
      c[i][j] = s;
    }
  }
  return c;
}

Eigen::MatrixXd to_matrix(const FractionMatrix& m) {
  const int n = static_cast<int>(m.size());
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out(i, j) = m[i][j].to_double();
  }
  return out;
}

// Extended-precision elimination for the experimental large orders, where
// the exact rational path would overflow 128-bit integers.
Eigen::MatrixXd invert_long_double(const Eigen::MatrixXd& in) {
  const int n = static_cast<int>(in.rows());
  std::vector<std::vector<long double>> a(n, std::vector<long double>(2 * n, 0.0L));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = static_cast<long double>(in(i, j));
    a[i][n + i] = 1.0L;
  }
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0L) throw NumericalError("mapping constants: singular G matrix");
    std::swap(a[col], a[pivot]);
    const long double p = a[col][col];
    for (int c = 0; c < 2 * n; ++c) a[col][c] /= p;
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0L) continue;
      const long double f = a[r][col];
      for (int c = 0; c < 2 * n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out(i, j) = static_cast<double>(a[i][n + j]);
  }
  return out;
}

long long product_range(int from, int to) {  // inclusive; empty range is 1
  long long p = 1;
  for (int k = from; k <= to; ++k) p *= k;
  return p;
}

}  // namespace

MappingConstants precompute_mapping_constants(int order) {
  if (order < 3 || order % 2 == 0) {
    throw ValidationError("mapping constants require an odd order >= 3");
  }
  const int S = (order + 1) / 2;
  MappingConstants mc;
  mc.order = order;
  mc.half_size = S;
  mc.E = Eigen::MatrixXd::Zero(S, S);
  mc.F = Eigen::MatrixXd::Zero(S, S);
  mc.G = Eigen::MatrixXd::Zero(S, S);
  mc.U = Eigen::MatrixXd::Zero(S, S);

  FractionMatrix Gf(S, std::vector<Fraction>(S));
  FractionMatrix Ff(S, std::vector<Fraction>(S));
  FractionMatrix Uf(S, std::vector<Fraction>(S));
  // 1-indexed product formulas; i0/j0 are the 0-indexed equivalents.
  for (int i0 = 0; i0 < S; ++i0) {
    for (int j0 = 0; j0 < S; ++j0) {
      if (i0 == j0) {
        const long long fact = product_range(1, i0);
        mc.E(i0, j0) = static_cast<double>(fact);
        mc.U(i0, j0) = 1.0 / static_cast<double>(fact);
        Uf[i0][j0] = Fraction(1, fact);
      }
      if (i0 <= j0) {
        const long long f = product_range(j0 - i0 + 1, j0);
        mc.F(i0, j0) = static_cast<double>(f);
        Ff[i0][j0] = Fraction(f);
      }
      const long long g = product_range(S - i0 + j0 + 1, S + j0);
      mc.G(i0, j0) = static_cast<double>(g);
      Gf[i0][j0] = Fraction(g);
    }
  }

  if (order <= 11) {
    const FractionMatrix Wf = invert_fractions(Gf);
    FractionMatrix Vf = multiply(multiply(Wf, Ff), Uf);
    for (auto& row : Vf) {
      for (auto& x : row) x = Fraction(0) - x;
    }
    mc.W = to_matrix(Wf);
    mc.V = to_matrix(Vf);
  } else {
    mc.W = invert_long_double(mc.G);
    mc.V = -mc.W * mc.F * mc.U;
  }
  return mc;
}

std::shared_ptr<const MappingConstants> shared_mapping_constants(int order) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const MappingConstants>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  auto mc = std::make_shared<const MappingConstants>(precompute_mapping_constants(order));
  cache.emplace(order, mc);
  return mc;
}

Eigen::VectorXd eval_basis(int order, int derivative, double t) {
  if (order < 0) throw ValidationError("eval_basis: negative order");
  if (derivative < 0) throw ValidationError("eval_basis: negative derivative order");
  if (!std::isfinite(t)) throw ValidationError("eval_basis: t must be finite");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(order + 1);
  if (derivative > order) return v;
  double power = 1.0;
  for (int k = derivative; k <= order; ++k) {
    double fall = 1.0;  // k (k-1) ... (k-i+1)
    for (int j = 0; j < derivative; ++j) fall *= static_cast<double>(k - j);
    v(k) = fall * power;
    power *= t;
  }
  return v;
}

Eigen::MatrixXd mapping_matrix(const MappingConstants& constants, double duration) {
  if (!(duration > 0.0)) throw ValidationError("mapping_matrix: duration must be positive");
  const int S = constants.half_size;
  const int n = constants.order + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a.topLeftCorner(S, S) = constants.E;
  for (int i0 = 0; i0 < S; ++i0) {
    for (int j0 = 0; j0 < S; ++j0) {
      a(S + i0, j0) = constants.F(i0, j0) * std::pow(duration, j0 - i0);
      a(S + i0, S + j0) = constants.G(i0, j0) * std::pow(duration, S - i0 + j0);
    }
  }
  return a;
}

Eigen::MatrixXd mapping_matrix_inverse(const MappingConstants& constants, double duration) {
  if (!(duration > 0.0)) throw ValidationError("mapping_matrix_inverse: duration must be positive");
  const int S = constants.half_size;
  const int n = constants.order + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a.topLeftCorner(S, S) = constants.U;
  for (int i0 = 0; i0 < S; ++i0) {
    for (int j0 = 0; j0 < S; ++j0) {
      const double power = std::pow(duration, j0 - i0 - S);
      a(S + i0, j0) = constants.V(i0, j0) * power;
      a(S + i0, S + j0) = constants.W(i0, j0) * power;
    }
  }
  return a;
}

}  // namespace altraj

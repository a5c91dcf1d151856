#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "laurent.hpp"

namespace sandpile {

using Rational = boost::multiprecision::cpp_rational;
using Matrix = std::vector<std::vector<long long>>;

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), k = b.size();
  Matrix c(n, std::vector<long long>(m, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
    }
  return c;
}

inline std::vector<long long> multiply(const Matrix& a, const std::vector<long long>& x) {
  std::vector<long long> y(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  return y;
}

/// Fraction-free Gaussian elimination.
inline BigInt determinant(const Matrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  std::vector<std::vector<BigInt>> a(n, std::vector<BigInt>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && a[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(a[k], a[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

/// Exact inverse over Q; nullopt when singular.
inline std::optional<std::vector<std::vector<Rational>>> rational_inverse(const Matrix& m) {
  const std::size_t n = m.size();
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
    a[i][n + i] = 1;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && a[p][col] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[p], a[col]);
    const Rational piv = a[col][col];
    for (auto& x : a[col]) x /= piv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || a[i][col] == 0) continue;
      const Rational factor = a[i][col];
      for (std::size_t j = col; j < 2 * n; ++j) a[i][j] -= factor * a[col][j];
    }
  }
  std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = a[i][n + j];
  return inv;
}

inline std::optional<std::vector<Rational>> solve_rational(const Matrix& a, const std::vector<long long>& b) {
  auto inv = rational_inverse(a);
  if (!inv) return std::nullopt;
  std::vector<Rational> x(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) x[i] += (*inv)[i][j] * b[j];
  return x;
}

/// Repeated integrality tests A x = b against a fixed nonsingular A, via
/// x = adj(A) b / det(A).
class ExactSolver {
 public:
  explicit ExactSolver(const Matrix& a) : n_(a.size()) {
    det_ = determinant(a);
    if (det_ == 0) throw std::invalid_argument("ExactSolver: singular matrix");
    auto inv = rational_inverse(a);
    adj_.assign(n_, std::vector<BigInt>(n_));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        const Rational v = (*inv)[i][j] * det_;
        adj_[i][j] = numerator(v);
      }
  }

  const BigInt& det() const { return det_; }

  std::optional<std::vector<long long>> integer_solution(const std::vector<long long>& b) const {
    std::vector<long long> x(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      BigInt s = 0;
      for (std::size_t j = 0; j < n_; ++j)
        if (b[j] != 0) s += adj_[i][j] * b[j];
      if (s % det_ != 0) return std::nullopt;
      x[i] = static_cast<long long>(s / det_);
    }
    return x;
  }

 private:
  std::size_t n_;
  BigInt det_;
  std::vector<std::vector<BigInt>> adj_;
};

inline std::optional<std::vector<long long>> integer_solution(const Matrix& a, const std::vector<long long>& b) {
  auto x = solve_rational(a, b);
  if (!x) throw std::invalid_argument("integer_solution: singular matrix");
  std::vector<long long> r(x->size());
  for (std::size_t i = 0; i < x->size(); ++i) {
    if (denominator((*x)[i]) != 1) return std::nullopt;
    r[i] = static_cast<long long>(numerator((*x)[i]));
  }
  return r;
}

/// Row-sum norm of A^{-1}; nullopt when singular.
inline std::optional<Rational> inverse_inf_norm(const Matrix& a) {
  auto inv = rational_inverse(a);
  if (!inv) return std::nullopt;
  Rational best = 0;
  for (const auto& row : *inv) {
    Rational s = 0;
    for (const auto& x : row) s += abs(x);
    best = std::max(best, s);
  }
  return best;
}

/// Z-matrix whose inverse exists and is entrywise nonnegative.
inline bool is_nonsingular_m_matrix(const Matrix& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (i != j && a[i][j] > 0) return false;
  auto inv = rational_inverse(a);
  if (!inv) return false;
  for (const auto& row : *inv)
    for (const auto& x : row)
      if (x < 0) return false;
  return true;
}

/// Exact division of univariate Laurent polynomials; the quotient when
/// divisor * q = dividend with q integral, nullopt otherwise.
inline std::optional<LaurentPoly> divide_univariate(const LaurentPoly& dividend, const LaurentPoly& divisor) {
  if (dividend.dim() != 1 || divisor.dim() != 1) throw std::invalid_argument("divide_univariate: univariate polynomials required");
  if (divisor.is_zero()) throw std::invalid_argument("divide_univariate: division by zero");
  if (dividend.is_zero()) return LaurentPoly(1);
  auto [dlo, dhi] = divisor.bounding_box();
  auto [plo, phi] = dividend.bounding_box();
  const int dl = dlo[0], dh = dhi[0];
  int pl = plo[0];
  const int ph = phi[0];
  if (ph - pl < dh - dl) return std::nullopt;
  std::vector<Rational> rem(static_cast<std::size_t>(ph - pl + 1), 0);
  for (const auto& [e, c] : dividend.terms()) rem[static_cast<std::size_t>(e[0] - pl)] = Rational(c);
  std::vector<Rational> dc(static_cast<std::size_t>(dh - dl + 1), 0);
  for (const auto& [e, c] : divisor.terms()) dc[static_cast<std::size_t>(e[0] - dl)] = Rational(c);
  const int qlen = (ph - pl) - (dh - dl) + 1;
  std::vector<Rational> q(static_cast<std::size_t>(qlen), 0);
  for (int k = qlen - 1; k >= 0; --k) {
    const Rational coef = rem[static_cast<std::size_t>(k + dh - dl)] / dc.back();
    q[static_cast<std::size_t>(k)] = coef;
    if (coef == 0) continue;
    for (std::size_t j = 0; j < dc.size(); ++j) rem[static_cast<std::size_t>(k) + j] -= coef * dc[j];
  }
  for (const auto& r : rem)
    if (r != 0) return std::nullopt;
  LaurentPoly quotient(1);
  for (int k = 0; k < qlen; ++k) {
    const Rational& c = q[static_cast<std::size_t>(k)];
    if (denominator(c) != 1) return std::nullopt;
    quotient.add_term({pl - dl + k}, numerator(c));
  }
  return quotient;
}

}  // namespace sandpile

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sandpile {

/// Roots of c[0] + c[1] x + ... + c[n] x^n (c[n] != 0), from the eigenvalues
/// of the companion matrix followed by a few Newton steps on the original
/// polynomial.
inline std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
  std::size_t deg = coeffs.size();
  while (deg > 0 && coeffs[deg - 1] == 0.0) --deg;
  if (deg == 0) throw std::invalid_argument("polynomial_roots: zero polynomial");
  const std::size_t n = deg - 1;
  if (n == 0) return {};

  const double lead = coeffs[n];
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i < n; ++i) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n - 1)) = -coeffs[i] / lead;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("polynomial_roots: eigenvalue solver failed");

  std::vector<std::complex<double>> roots;
  roots.reserve(n);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) roots.push_back(solver.eigenvalues()(i));

  // polish
  for (auto& r : roots) {
    for (int iter = 0; iter < 8; ++iter) {
      std::complex<double> p = 0.0, dp = 0.0;
      for (std::size_t k = n + 1; k-- > 0;) {
        dp = dp * r + p;
        p = p * r + coeffs[k];
      }
      if (std::abs(dp) == 0.0) break;
      const std::complex<double> step = p / dp;
      r -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(r))) break;
    }
  }
  return roots;
}

}  // namespace sandpile

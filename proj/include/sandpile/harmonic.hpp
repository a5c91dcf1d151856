#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

#include "errors.hpp"
#include "laurent.hpp"
#include "roots.hpp"
#include "toppling.hpp"
#include "window.hpp"

namespace sandpile {

/// Truncation of the summable solution of h * w = delta_0 to the box Q_M.
struct HomoclinicKernel {
  LaurentPoly poly{1};
  int radius = 0;
  std::vector<double> values;  // lexicographic over {-M..M}^d
  double residual = 0.0;       // sup |h * w - delta_0| on Q_{M - diam supp h}
  double boundary_max = 0.0;   // sup |w| on the outer shell of Q_M
  double interior_max = 0.0;
  double expansiveness_gap = 0.0;
  std::string method;

  int dim() const { return poly.dim(); }
  int side() const { return 2 * radius + 1; }

  bool inside(const Site& n) const {
    return std::all_of(n.begin(), n.end(), [&](int x) { return x >= -radius && x <= radius; });
  }

  std::size_t offset(const Site& n) const {
    std::size_t k = 0;
    for (int x : n) k = k * static_cast<std::size_t>(side()) + static_cast<std::size_t>(x + radius);
    return k;
  }

  /// w_n, or 0 outside the truncation box.
  double at(const Site& n) const { return inside(n) ? values[offset(n)] : 0.0; }
};

namespace detail {

template <class Fn>
void for_each_in_cube(int d, int m, Fn&& fn) {
  Site n(static_cast<std::size_t>(d), -m);
  while (true) {
    fn(n);
    int k = d - 1;
    while (k >= 0 && n[k] == m) n[k--] = -m;
    if (k < 0) return;
    ++n[k];
  }
}

inline int support_radius(const LaurentPoly& h) {
  int r = 0;
  for (const auto& e : h.support())
    for (int x : e) r = std::max(r, std::abs(x));
  return r;
}

inline void finalize(HomoclinicKernel& k) {
  const int d = k.dim();
  const int inner = std::max(0, k.radius - 2 * support_radius(k.poly));
  double res = 0.0;
  for_each_in_cube(d, inner, [&](const Site& n) {
    double s = 0.0;
    for (const auto& [e, c] : k.poly.terms()) s += static_cast<double>(c) * k.at(n - e);
    if (is_origin(n)) s -= 1.0;
    res = std::max(res, std::abs(s));
  });
  k.residual = res;
  double bmax = 0.0, imax = 0.0;
  for_each_in_cube(d, k.radius, [&](const Site& n) {
    const double v = std::abs(k.at(n));
    const bool shell = std::any_of(n.begin(), n.end(), [&](int x) { return std::abs(x) == k.radius; });
    if (shell) {
      bmax = std::max(bmax, v);
    } else {
      imax = std::max(imax, v);
    }
  });
  k.boundary_max = bmax;
  k.interior_max = imax;
}

inline double expansiveness_gap(const LaurentPoly& h) {
  const BigInt l1 = h.l1_norm();
  BigInt best = 0;
  for (const auto& t : h.terms()) best = std::max(best, BigInt(abs(t.second)));
  if (2 * best > l1) return static_cast<double>(2 * best - l1);
  return 0.0;
}

/// Laurent coefficients of 1/h on the unit circle via partial fractions over
/// the (simple) roots; false when roots are too close to separate.
inline bool partial_fraction_kernel(HomoclinicKernel& k) {
  int lo = 0;
  const auto c = shifted_coefficients(k.poly, &lo);
  const auto roots = polynomial_roots(c);
  for (std::size_t a = 0; a < roots.size(); ++a) {
    if (std::abs(std::abs(roots[a]) - 1.0) < 1e-9) return false;
    for (std::size_t b = a + 1; b < roots.size(); ++b)
      if (std::abs(roots[a] - roots[b]) < 1e-6) return false;
  }
  const std::size_t deg = c.size() - 1;
  if (deg == 0) {
    k.values.assign(static_cast<std::size_t>(k.side()), 0.0);
    if (std::abs(lo) <= k.radius) k.values[k.offset({-lo})] = 1.0 / c[0];
    return true;
  }
  std::vector<std::complex<double>> residue(roots.size());
  for (std::size_t a = 0; a < roots.size(); ++a) {
    std::complex<double> dp = 0.0;
    for (std::size_t j = deg; j >= 1; --j) dp = dp * roots[a] + static_cast<double>(j) * c[j];
    residue[a] = 1.0 / dp;
  }
  // 1/p(u) = sum_n c_n u^n;  w_m = c_{m + lo}
  auto coeff = [&](int n) {
    std::complex<double> s = 0.0;
    for (std::size_t a = 0; a < roots.size(); ++a) {
      const auto r = roots[a];
      if (std::abs(r) > 1.0 && n >= 0) s -= residue[a] * std::pow(r, -n - 1);
      if (std::abs(r) < 1.0 && n < 0) s += residue[a] * std::pow(r, -n - 1);
    }
    return s.real();
  };
  k.values.resize(static_cast<std::size_t>(k.side()));
  for (int m = -k.radius; m <= k.radius; ++m) k.values[static_cast<std::size_t>(m + k.radius)] = coeff(m + lo);
  return true;
}

/// Samples 1/h on an L^d torus grid; w_n is the forward discrete Fourier
/// coefficient at n, and aliasing decays with the kernel's tail.
inline void fourier_kernel(HomoclinicKernel& k, int grid) {
  const int d = k.dim();
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) {
    total *= static_cast<std::size_t>(grid);
    if (total > (std::size_t{1} << 26)) throw GuardError("homoclinic: Fourier grid too large");
  }
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
  if (!buf) throw std::bad_alloc();
  std::vector<int> dims(static_cast<std::size_t>(d), grid);
  fftw_plan plan = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> t(static_cast<std::size_t>(d));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int i = d - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % static_cast<std::size_t>(grid));
      rem /= static_cast<std::size_t>(grid);
    }
    for (int i = 0; i < d; ++i) t[i] = static_cast<double>(idx[i]) / grid;
    const std::complex<double> v = 1.0 / eval_torus(k.poly, t);
    buf[flat][0] = v.real();
    buf[flat][1] = v.imag();
  }
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  k.values.assign(static_cast<std::size_t>(std::pow(k.side(), d)), 0.0);
  for_each_in_cube(d, k.radius, [&](const Site& n) {
    std::size_t flat = 0;
    for (int i = 0; i < d; ++i) flat = flat * static_cast<std::size_t>(grid) + static_cast<std::size_t>(((n[i] % grid) + grid) % grid);
    k.values[k.offset(n)] = buf[flat][0] / static_cast<double>(total);
  });
  fftw_free(buf);
}

}  // namespace detail

/// Solves h * w = delta_0, growing the truncation radius until the
/// convolution residual and the boundary magnitude fall below tolerance.
inline HomoclinicKernel homoclinic(const LaurentPoly& h, double tolerance = 1e-9, int max_radius = 400, int start_radius = 8) {
  if (h.is_zero()) throw std::invalid_argument("homoclinic: zero polynomial");
  const auto cert = expansiveness_certificate(h, 64);
  if (!cert.expansive) throw std::invalid_argument("homoclinic: " + to_string(h) + " is not certified expansive");
  if (h.dim() >= 2 && cert.heuristic) throw std::invalid_argument("homoclinic: expansiveness of " + to_string(h) + " only heuristic");
  HomoclinicKernel k;
  k.poly = h;
  k.expansiveness_gap = detail::expansiveness_gap(h);
  const int reach = detail::support_radius(h);
  for (int m = std::max(start_radius, 2 * reach + 2); m <= max_radius; m *= 2) {
    k.radius = m;
    bool done = false;
    if (h.dim() == 1) {
      k.method = "partial-fractions";
      done = detail::partial_fraction_kernel(k);
    }
    if (!done) {
      k.method = "fourier";
      detail::fourier_kernel(k, 4 * k.side());
    }
    detail::finalize(k);
    if (k.residual < tolerance && k.boundary_max < tolerance) return k;
  }
  throw std::runtime_error("homoclinic: tolerance " + std::to_string(tolerance) + " not reached within radius " + std::to_string(max_radius));
}

/// Values in [0,1) on a window.
struct TorusWindow {
  WindowPtr window;
  std::vector<double> values;
};

inline double frac(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;
  return f;
}

/// Distance to the nearest integer.
inline double torus_distance(double x) {
  const double f = frac(x);
  return std::min(f, 1.0 - f);
}

/// An integer-valued sequence with finite support.
struct IntegerField {
  WindowPtr window;
  std::vector<long long> values;
};

/// Coefficients of a polynomial as a field on its bounding box.
inline IntegerField to_field(const LaurentPoly& p) {
  if (p.is_zero()) return {make_window(Window(p.dim(), {Site(static_cast<std::size_t>(p.dim()), 0)})), {0}};
  const auto [lo, hi] = p.bounding_box();
  std::vector<std::pair<int, int>> ranges;
  for (std::size_t i = 0; i < lo.size(); ++i) ranges.emplace_back(lo[i], hi[i]);
  auto w = make_window(Window::box(ranges));
  IntegerField out{w, std::vector<long long>(w->size(), 0)};
  for (const auto& [e, c] : p.terms()) out.values[*w->index(e)] = static_cast<long long>(c);
  return out;
}

/// rho(w^h * v) on the evaluation window. The truncation bound counts the
/// pairs (n, j) whose difference leaves the kernel box.
inline TorusWindow xi(const IntegerField& v, const HomoclinicKernel& k, const WindowPtr& eval, double tolerance = 1e-8) {
  if (v.window->dim() != k.dim() || eval->dim() != k.dim()) throw std::invalid_argument("xi: dimension mismatch");
  long long l1 = 0;
  bool outside = false;
  for (std::size_t j = 0; j < v.values.size(); ++j) {
    if (v.values[j] == 0) continue;
    l1 += std::abs(v.values[j]);
    for (const auto& n : eval->sites())
      if (!k.inside(n - (*v.window)[j])) outside = true;
  }
  if (outside && static_cast<double>(l1) * k.boundary_max > tolerance)
    throw std::invalid_argument("xi: truncation error bound exceeds tolerance; enlarge the kernel radius");
  TorusWindow out{eval, std::vector<double>(eval->size(), 0.0)};
  for (std::size_t a = 0; a < eval->size(); ++a) {
    double s = 0.0;
    for (std::size_t j = 0; j < v.values.size(); ++j)
      if (v.values[j] != 0) s += k.at((*eval)[a] - (*v.window)[j]) * static_cast<double>(v.values[j]);
    out.values[a] = frac(s);
  }
  return out;
}

/// max over admissible m of the torus distance of sum_n h_n x_{n+m} to 0.
inline double check_in_Xh(const TorusWindow& x, const LaurentPoly& h) {
  if (x.window->dim() != h.dim()) throw std::invalid_argument("check_in_Xh: dimension mismatch");
  double worst = 0.0;
  bool any = false;
  for (const auto& m : x.window->sites()) {
    double s = 0.0;
    bool ok = true;
    for (const auto& [e, c] : h.terms()) {
      const auto idx = x.window->index(e + m);
      if (!idx) {
        ok = false;
        break;
      }
      s += static_cast<double>(c) * x.values[*idx];
    }
    if (!ok) continue;
    any = true;
    worst = std::max(worst, torus_distance(s));
  }
  if (!any) throw std::invalid_argument("check_in_Xh: window smaller than the support of h");
  return worst;
}

struct MahlerResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::string method;
  std::string warning;
};

/// Logarithmic Mahler measure: from roots in one variable, otherwise by
/// midpoint quadrature of log|h| on the torus with successive doubling.
inline MahlerResult mahler(const LaurentPoly& h, int resolution = 64) {
  if (h.is_zero()) throw std::invalid_argument("mahler: zero polynomial");
  MahlerResult r;
  if (h.dim() == 1) {
    const auto c = shifted_coefficients(h);
    double s = std::log(std::abs(c.back()));
    for (const auto& z : polynomial_roots(c)) s += std::log(std::max(1.0, std::abs(z)));
    r.value = s;
    r.method = "roots";
    return r;
  }
  const auto cert = expansiveness_certificate(h, 32);
  const int d = h.dim();
  int levels = 4;
  if (!cert.expansive) {
    r.warning = "zeros on the torus; quadrature converges slowly";
    levels = 6;
  }
  auto quad = [&](int n) {
    double sum = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> t(static_cast<std::size_t>(d));
    while (true) {
      for (int k = 0; k < d; ++k) t[k] = (idx[k] + 0.5) / n;
      sum += std::log(std::abs(eval_torus(h, t)));
      int k = 0;
      while (k < d && ++idx[k] == n) idx[k++] = 0;
      if (k == d) break;
    }
    return sum / std::pow(static_cast<double>(n), d);
  };
  int n = std::max(4, resolution / 4);
  double prev = quad(n);
  for (int level = 0; level < levels; ++level) {
    n *= 2;
    const double cur = quad(n);
    r.error_estimate = std::abs(cur - prev);
    r.value = cur;
    prev = cur;
    if (r.error_estimate < 1e-12) break;
  }
  r.method = "midpoint";
  return r;
}

}  // namespace sandpile

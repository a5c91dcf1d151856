#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "exact.hpp"
#include "group.hpp"
#include "laurent.hpp"
#include "toppling.hpp"
#include "window.hpp"

namespace sandpile {

/// BTW-type model on a window: toppling condition from g, toppling rule from
/// f, combined toppling matrix Delta' = Delta^g Delta^f.
struct ProductModel {
  LaurentPoly f, g, h;
  WindowPtr window;
  Matrix delta_f, delta_g, delta_prime;
  long long gamma_prime = 0;
  long long beta = 0;
  Validity validity;

  bool valid() const { return validity.asm_valid(); }

  TopplingMatrix prime() const { return TopplingMatrix(window, delta_prime); }

  /// Delta^g v.
  std::vector<long long> apply_g(const std::vector<long long>& v) const { return multiply(delta_g, v); }
};

/// sum of f_k g_{-k} over the k where that product is positive.
inline long long gamma_prime(const LaurentPoly& f, const LaurentPoly& g) {
  BigInt s = 0;
  for (const auto& [k, fk] : f.terms()) {
    const BigInt p = fk * g.coeff(-k);
    if (p > 0) s += p;
  }
  return static_cast<long long>(s);
}

inline ProductModel build_product_model(const LaurentPoly& f, const LaurentPoly& g, const WindowPtr& window) {
  if (f.dim() != g.dim() || f.dim() != window->dim()) throw std::invalid_argument("build_product_model: dimension mismatch");
  if (f.is_zero() || g.is_zero()) throw std::invalid_argument("build_product_model: zero polynomial");
  ProductModel m;
  m.f = f;
  m.g = g;
  m.h = f * g;
  m.window = window;
  m.delta_f = induced_matrix(f, *window);
  m.delta_g = induced_matrix(g, *window);
  m.delta_prime = multiply(m.delta_g, m.delta_f);
  m.gamma_prime = gamma_prime(f, g);
  m.beta = static_cast<long long>(f.l1_norm()) * m.gamma_prime;
  m.validity = m.prime().validate();
  return m;
}

inline ProductModel build_product_model(const LaurentPoly& f, const LaurentPoly& g, const Window& window) {
  return build_product_model(f, g, make_window(window));
}

inline void require_valid(const ProductModel& m, const char* where) {
  if (!m.valid()) {
    std::string msg = std::string(where) + ": Delta' does not determine a sandpile model";
    for (const auto& v : m.validity.violations) msg += "; " + v;
    throw std::invalid_argument(msg);
  }
}

/// Topples the lowest-index site k with (Delta^g v)_k >= Delta'_kk by
/// subtracting column k of Delta^f, until none is left.
inline StabilizationResult btw_stabilize(const Config& v, const ProductModel& m, std::uint64_t max_topplings = 100000000) {
  require_valid(m, "btw_stabilize");
  const std::size_t n = m.window->size();
  if (v.heights.size() != n) throw std::invalid_argument("btw_stabilize: configuration does not match window");
  for (long long x : v.heights)
    if (x < 0) throw std::invalid_argument("btw_stabilize: negative height");
  Heights cur = v.heights;
  std::vector<long long> slope = m.apply_g(cur);
  std::vector<long long> odo(n, 0);
  std::uint64_t count = 0;
  while (true) {
    std::size_t k = 0;
    while (k < n && slope[k] < m.delta_prime[k][k]) ++k;
    if (k == n) break;
    if (++count > max_topplings) throw GuardError("btw_stabilize: toppling budget exhausted at site " + std::to_string(k));
    for (std::size_t j = 0; j < n; ++j) {
      cur[j] -= m.delta_f[j][k];
      slope[j] -= m.delta_prime[j][k];
    }
    ++odo[k];
  }
  return {{v.window, std::move(cur)}, std::move(odo)};
}

struct Membership {
  bool member = false;
  bool recurrent = false;
  std::optional<std::vector<long long>> cofactor;
};

/// v in W_F iff v is recurrent for Delta' and Delta^g x = v has an integral solution.
inline Membership w_membership(const Config& v, const ProductModel& m, const ExactSolver* solver = nullptr) {
  require_valid(m, "w_membership");
  const TopplingMatrix prime = m.prime();
  Membership r;
  r.recurrent = prime.is_stable(v.heights) && is_recurrent_burning(v, prime);
  if (!r.recurrent) return r;
  std::optional<ExactSolver> own;
  if (!solver) {
    if (determinant(m.delta_g) == 0) throw std::logic_error("w_membership: singular Delta^g");
    own.emplace(m.delta_g);
    solver = &*own;
  }
  r.cofactor = solver->integer_solution(v.heights);
  r.member = r.cofactor.has_value();
  return r;
}

enum class WStrategy { Auto, FilterRecurrent, CofactorScan, GeneratorClosure };

inline const char* to_string(WStrategy s) {
  switch (s) {
    case WStrategy::Auto: return "auto";
    case WStrategy::FilterRecurrent: return "filter-recurrent";
    case WStrategy::CofactorScan: return "cofactor-scan";
    case WStrategy::GeneratorClosure: return "generator-closure";
  }
  return "?";
}

struct WGroup {
  std::vector<Heights> elements_w;            // lexicographic
  std::vector<std::vector<long long>> elements_v;  // Delta^g v = w
  WStrategy strategy = WStrategy::Auto;

  std::size_t size() const { return elements_w.size(); }
  bool contains(const Heights& w) const { return std::binary_search(elements_w.begin(), elements_w.end(), w); }
};

namespace detail {

inline std::optional<std::uint64_t> power_count(long long base, std::size_t exp, std::uint64_t limit) {
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < exp; ++k) {
    if (total > limit / static_cast<std::uint64_t>(base)) return std::nullopt;
    total *= static_cast<std::uint64_t>(base);
  }
  return total;
}

inline WGroup finish(std::map<Heights, std::vector<long long>> found, WStrategy s) {
  WGroup w;
  w.strategy = s;
  for (auto& [k, v] : found) {
    w.elements_w.push_back(k);
    w.elements_v.push_back(std::move(v));
  }
  return w;
}

}  // namespace detail

/// W_F by one of three independent routes: filtering the recurrent class of
/// Delta' by integrality, scanning cofactors in [0, beta)^F, or closing the
/// images of Delta^g e_i under the group operation.
inline WGroup enumerate_W(const ProductModel& m, WStrategy strategy = WStrategy::Auto, std::uint64_t guard = kEnumerationGuard) {
  require_valid(m, "enumerate_W");
  const TopplingMatrix prime = m.prime();
  const std::size_t n = prime.size();
  const ExactSolver solver(m.delta_g);
  const auto filter_cost = stable_count(prime, guard);
  const auto scan_cost = detail::power_count(std::max<long long>(m.beta, 1), n, guard);

  if (strategy == WStrategy::Auto) {
    if (filter_cost) strategy = WStrategy::FilterRecurrent;
    else if (scan_cost) strategy = WStrategy::CofactorScan;
    else strategy = WStrategy::GeneratorClosure;
  }

  std::map<Heights, std::vector<long long>> found;
  if (strategy == WStrategy::FilterRecurrent) {
    if (!filter_cost) throw GuardError("enumerate_W: recurrent candidate space exceeds guard");
    Config probe{m.window, {}};
    for_each_stable(prime, [&](const Heights& h) {
      probe.heights = h;
      if (!is_recurrent_burning(probe, prime)) return;
      if (auto x = solver.integer_solution(h)) found.emplace(h, std::move(*x));
    });
  } else if (strategy == WStrategy::CofactorScan) {
    if (!scan_cost) throw GuardError("enumerate_W: cofactor box exceeds guard");
    std::vector<long long> v(n, 0);
    Config probe{m.window, {}};
    while (true) {
      probe.heights = m.apply_g(v);
      if (prime.is_stable(probe.heights) && is_recurrent_burning(probe, prime)) found.emplace(probe.heights, v);
      std::size_t k = n;
      while (k > 0 && v[k - 1] == m.beta - 1) v[--k] = 0;
      if (k == 0) break;
      ++v[k - 1];
    }
  } else {
    std::vector<Config> gens;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<long long> e(n, 0);
      e[i] = 1;
      gens.push_back(recurrent_representative(m.apply_g(e), prime));
    }
    const Config id = identity(prime);
    std::set<Heights> seen{id.heights};
    std::deque<Config> queue{id};
    while (!queue.empty()) {
      const Config x = queue.front();
      queue.pop_front();
      for (const auto& gen : gens) {
        Config y = add(x, gen, prime);
        if (seen.insert(y.heights).second) {
          if (seen.size() > guard) throw GuardError("enumerate_W: subgroup exceeds guard");
          queue.push_back(std::move(y));
        }
      }
    }
    for (const auto& h : seen) {
      auto x = solver.integer_solution(h);
      if (!x) throw std::logic_error("enumerate_W: closure produced a non-multiple of Delta^g");
      found.emplace(h, std::move(*x));
    }
  }
  return detail::finish(std::move(found), strategy);
}

struct ProjectionReport {
  bool equal = false;
  bool vacuous = false;
  std::size_t interior_size = 0;
  std::size_t projected = 0;
  std::size_t direct = 0;
  std::optional<Heights> witness;  // first element of the symmetric difference
  std::string warning;
};

/// Compares the restriction of the Delta'-recurrent class to the interior
/// {i : i + supp(f) in F} with the recurrent class of h on that interior.
/// A pattern p on the interior extends to a recurrent configuration iff its
/// extension by maximal heights does, since the recurrent class is closed
/// upwards among stable configurations.
inline ProjectionReport projection_check(const ProductModel& m, std::uint64_t guard = kEnumerationGuard) {
  require_valid(m, "projection_check");
  if (!classify(m.h).sandpile) throw std::invalid_argument("projection_check: f*g is not a sandpile polynomial");
  ProjectionReport r;
  const auto inner = interior(*m.window, m.f);
  if (!inner) {
    r.equal = true;
    r.vacuous = true;
    r.warning = "interior is empty";
    return r;
  }
  r.interior_size = inner->size();
  const TopplingMatrix prime = m.prime();
  const TopplingMatrix dh = toppling_matrix(m.h, make_window(*inner));
  std::vector<std::size_t> pos;
  for (const auto& s : inner->sites()) pos.push_back(*m.window->index(s));

  Matrix sub(inner->size(), std::vector<long long>(inner->size()));
  for (std::size_t a = 0; a < pos.size(); ++a) sub[a][a] = prime.diag(pos[a]);
  const TopplingMatrix box(make_window(*inner), sub);
  if (!stable_count(box, guard) || !stable_count(dh, guard)) throw GuardError("projection_check: interior candidate space exceeds guard");

  std::set<Heights> projected;
  Config probe = prime.v_max();
  for_each_stable(box, [&](const Heights& p) {
    for (std::size_t a = 0; a < pos.size(); ++a) probe.heights[pos[a]] = p[a];
    if (is_recurrent_burning(probe, prime)) projected.insert(p);
  });
  const auto direct = enumerate_recurrent(dh, guard);
  const std::set<Heights> direct_set(direct.elements().begin(), direct.elements().end());
  r.projected = projected.size();
  r.direct = direct_set.size();
  r.equal = projected == direct_set;
  if (!r.equal) {
    std::vector<Heights> diff;
    std::set_symmetric_difference(projected.begin(), projected.end(), direct_set.begin(), direct_set.end(), std::back_inserter(diff));
    r.witness = diff.front();
  }
  return r;
}

}  // namespace sandpile

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "exact.hpp"
#include "toppling.hpp"

namespace sandpile {

/// Number of stable configurations, or nullopt beyond `limit`.
inline std::optional<std::uint64_t> stable_count(const TopplingMatrix& delta, std::uint64_t limit) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const auto d = static_cast<std::uint64_t>(delta.diag(i));
    if (total > limit / d) return std::nullopt;
    total *= d;
  }
  return total;
}

/// S(z - S(z)) with z = 2 v_max: a recurrent configuration congruent to 0.
inline Config identity(const TopplingMatrix& delta) {
  Config z = delta.v_max();
  for (auto& x : z.heights) x *= 2;
  const Config s = stabilize(z, delta).stable;
  for (std::size_t i = 0; i < z.size(); ++i) z.heights[i] -= s.heights[i];
  return stabilize(z, delta).stable;
}

/// Idempotent of the cyclic subgroup generated by a recurrent x, reached by
/// walking x, 2x, 3x, ... until y + y = y.
inline Config identity_by_iteration(const Config& x, const TopplingMatrix& delta, std::size_t max_steps = 100000000) {
  Config y = x;
  for (std::size_t step = 0; step < max_steps; ++step) {
    if (add(y, y, delta) == y) return y;
    y = add(y, x, delta);
  }
  throw GuardError("identity_by_iteration: step budget exhausted");
}

/// A step vector s = Delta x0 with x0 integral and s > 0 componentwise.
inline std::vector<long long> positive_step(const TopplingMatrix& delta) {
  const std::size_t n = delta.size();
  auto x = solve_rational(delta.matrix(), std::vector<long long>(n, 1));
  if (!x) throw std::invalid_argument("positive_step: singular toppling matrix");
  BigInt l = 1;
  for (const auto& q : *x) {
    if (q <= 0) throw std::invalid_argument("positive_step: toppling matrix is not an M-matrix");
    l = boost::multiprecision::lcm(l, BigInt(denominator(q)));
  }
  return std::vector<long long>(n, static_cast<long long>(l));
}

/// The recurrent configuration congruent to w modulo the lattice Delta Z^F.
inline Config recurrent_representative(const std::vector<long long>& w, const TopplingMatrix& delta) {
  const std::size_t n = delta.size();
  if (w.size() != n) throw std::invalid_argument("recurrent_representative: vector does not match window");
  const auto step = positive_step(delta);
  long long t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long long need = delta.diag(i) - 1 - w[i];
    if (need > 0) t = std::max(t, (need + step[i] - 1) / step[i]);
  }
  Heights h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = w[i] + t * step[i];
  return stabilize(Config{delta.window(), std::move(h)}, delta).stable;
}

/// Inverse via S(z - S(z) - v) with z = 3 v_max.
inline Config inverse_direct(const Config& v, const TopplingMatrix& delta) {
  Config z = delta.v_max();
  for (auto& x : z.heights) x *= 3;
  const Config s = stabilize(z, delta).stable;
  for (std::size_t i = 0; i < z.size(); ++i) z.heights[i] -= s.heights[i] + v.heights[i];
  return stabilize(z, delta).stable;
}

class RecurrentGroup {
 public:
  RecurrentGroup(TopplingMatrix delta, std::vector<Heights> elements)
      : delta_(std::move(delta)), elements_(std::move(elements)) {
    for (std::size_t k = 0; k < elements_.size(); ++k) index_.emplace(elements_[k], k);
    identity_ = sandpile::identity(delta_);
  }

  const TopplingMatrix& matrix() const { return delta_; }
  std::size_t order() const { return elements_.size(); }
  const std::vector<Heights>& elements() const { return elements_; }
  Config element(std::size_t k) const { return {delta_.window(), elements_[k]}; }
  const Config& identity() const { return identity_; }

  bool contains(const Config& v) const { return index_.count(v.heights) > 0; }
  std::optional<std::size_t> index_of(const Config& v) const {
    auto it = index_.find(v.heights);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Config add(const Config& u, const Config& v) const { return sandpile::add(u, v, delta_); }

  /// The element preceding the identity in the cycle v, v+v, v+v+v, ...
  Config inverse(const Config& v) const {
    if (!contains(v)) throw std::invalid_argument("inverse: configuration is not recurrent");
    Config prev = v, y = v;
    for (std::size_t step = 0; step <= order(); ++step) {
      if (y == identity_) return prev;
      prev = y;
      y = add(y, v);
    }
    throw std::logic_error("inverse: cycle did not reach the identity");
  }

  Config haar_uniform(std::mt19937_64& rng) const {
    if (elements_.empty()) throw std::logic_error("haar_uniform: empty group");
    std::uniform_int_distribution<std::size_t> pick(0, elements_.size() - 1);
    return element(pick(rng));
  }

 private:
  TopplingMatrix delta_;
  std::vector<Heights> elements_;
  std::map<Heights, std::size_t> index_;
  Config identity_;
};

/// Visits every stable configuration in lexicographic order.
template <class Fn>
void for_each_stable(const TopplingMatrix& delta, Fn&& fn) {
  const std::size_t n = delta.size();
  Heights h(n, 0);
  while (true) {
    fn(h);
    std::size_t k = n;
    while (k > 0 && h[k - 1] == delta.diag(k - 1) - 1) h[--k] = 0;
    if (k == 0) return;
    ++h[k - 1];
  }
}

inline constexpr std::uint64_t kEnumerationGuard = 10000000;

/// All stable configurations passing the burning test, lexicographically.
inline RecurrentGroup enumerate_recurrent(const TopplingMatrix& delta, std::uint64_t guard = kEnumerationGuard) {
  if (!stable_count(delta, guard)) throw GuardError("enumerate_recurrent: more than " + std::to_string(guard) + " stable configurations");
  std::vector<Heights> elements;
  Config probe{delta.window(), {}};
  for_each_stable(delta, [&](const Heights& h) {
    probe.heights = h;
    if (is_recurrent_burning(probe, delta)) elements.push_back(h);
  });
  return RecurrentGroup(delta, std::move(elements));
}

inline Config haar_uniform(const RecurrentGroup& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return g.haar_uniform(rng);
}

}  // namespace sandpile

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "exact.hpp"
#include "laurent.hpp"
#include "window.hpp"

namespace sandpile {

using Heights = std::vector<long long>;
using WindowPtr = std::shared_ptr<const Window>;

inline WindowPtr make_window(Window w) { return std::make_shared<const Window>(std::move(w)); }

struct Config {
  WindowPtr window;
  Heights heights;

  long long operator[](std::size_t k) const { return heights[k]; }
  std::size_t size() const { return heights.size(); }

  bool operator==(const Config& o) const {
    return heights == o.heights && (window == o.window || *window == *o.window);
  }
};

struct Validity {
  bool p1 = true;               // positive diagonal, nonpositive off-diagonal
  bool p2 = true;               // strictly positive row sums
  bool weakly_dominant = true;  // nonnegative row sums
  bool m_matrix = true;         // nonsingular with entrywise nonnegative inverse
  std::vector<std::string> violations;

  /// Stabilization terminates and the stable recurrent class is a group.
  bool asm_valid() const { return p1 && weakly_dominant && m_matrix; }
};

/// Which neighbour mass the burning threshold of site i counts: grains i
/// receives when the other sites topple (row entries Delta_ij), or grains i
/// emits to them (column entries Delta_ji). They coincide for symmetric Delta.
enum class Orientation { Received, Emitted };

class TopplingMatrix {
 public:
  TopplingMatrix(WindowPtr window, Matrix entries) : window_(std::move(window)), a_(std::move(entries)) {
    const std::size_t n = window_->size();
    if (a_.size() != n) throw std::invalid_argument("TopplingMatrix: row count does not match window");
    for (const auto& row : a_)
      if (row.size() != n) throw std::invalid_argument("TopplingMatrix: matrix not square");
    cols_.resize(n);
    rows_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && a_[i][j] != 0) {
          rows_[i].emplace_back(j, a_[i][j]);
          cols_[j].emplace_back(i, a_[i][j]);
        }
  }

  std::size_t size() const { return a_.size(); }
  const WindowPtr& window() const { return window_; }
  const Matrix& matrix() const { return a_; }
  long long operator()(std::size_t i, std::size_t j) const { return a_[i][j]; }
  long long diag(std::size_t i) const { return a_[i][i]; }

  /// Off-diagonal nonzeros (row index, value) in column j.
  const std::vector<std::pair<std::size_t, long long>>& column(std::size_t j) const { return cols_[j]; }
  /// Off-diagonal nonzeros (column index, value) in row i.
  const std::vector<std::pair<std::size_t, long long>>& row(std::size_t i) const { return rows_[i]; }

  Validity validate() const {
    Validity v;
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
      long long sum = 0;
      for (std::size_t j = 0; j < n; ++j) {
        sum += a_[i][j];
        if (i == j && a_[i][j] <= 0) {
          v.p1 = false;
          v.violations.push_back("nonpositive diagonal at " + std::to_string(i));
        }
        if (i != j && a_[i][j] > 0) {
          v.p1 = false;
          v.violations.push_back("positive off-diagonal at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
      }
      if (sum <= 0) {
        v.p2 = false;
        v.violations.push_back("row sum " + std::to_string(sum) + " at " + std::to_string(i));
      }
      if (sum < 0) v.weakly_dominant = false;
    }
    v.m_matrix = v.p1 && is_nonsingular_m_matrix(a_);
    if (!v.m_matrix) v.violations.push_back("not a nonsingular M-matrix");
    return v;
  }

  bool is_stable(const Heights& h) const {
    for (std::size_t i = 0; i < h.size(); ++i)
      if (h[i] < 0 || h[i] >= a_[i][i]) return false;
    return true;
  }

  Config v_max() const {
    Heights h(size());
    for (std::size_t i = 0; i < size(); ++i) h[i] = a_[i][i] - 1;
    return {window_, std::move(h)};
  }

  Config zero() const { return {window_, Heights(size(), 0)}; }

  Config config(Heights h) const {
    if (h.size() != size()) throw std::invalid_argument("config: height vector does not match window");
    return {window_, std::move(h)};
  }

  /// Delta * x.
  Heights apply(const std::vector<long long>& x) const { return multiply(a_, x); }

 private:
  WindowPtr window_;
  Matrix a_;
  std::vector<std::vector<std::pair<std::size_t, long long>>> cols_, rows_;
};

/// Delta_ij = h_{i-j} restricted to the window.
inline Matrix induced_matrix(const LaurentPoly& h, const Window& f) {
  if (h.dim() != f.dim()) throw std::invalid_argument("induced_matrix: dimension mismatch");
  const std::size_t n = f.size();
  Matrix a(n, std::vector<long long>(n, 0));
  for (std::size_t j = 0; j < n; ++j)
    for (const auto& [e, c] : h.terms()) {
      if (auto i = f.index(f[j] + e)) a[*i][j] = static_cast<long long>(c);
    }
  return a;
}

inline TopplingMatrix toppling_matrix(const LaurentPoly& h, const WindowPtr& f) {
  if (!classify(h).sandpile) throw std::invalid_argument("toppling_matrix: " + to_string(h) + " is not a sandpile polynomial");
  return TopplingMatrix(f, induced_matrix(h, *f));
}

inline TopplingMatrix toppling_matrix(const LaurentPoly& h, const Window& f) { return toppling_matrix(h, make_window(f)); }

inline Config topple(const Config& v, std::size_t i, const TopplingMatrix& delta) {
  if (i >= delta.size()) throw std::out_of_range("topple: site index out of range");
  if (v.heights[i] < delta.diag(i)) throw std::invalid_argument("topple: site " + std::to_string(i) + " is stable");
  Config r = v;
  r.heights[i] -= delta.diag(i);
  for (const auto& [j, a] : delta.column(i)) r.heights[j] -= a;
  return r;
}

struct StabilizationResult {
  Config stable;
  std::vector<long long> odometer;
};

/// FIFO schedule; a dequeued site topples as many times as it can at once.
inline StabilizationResult stabilize(const Config& v, const TopplingMatrix& delta) {
  const std::size_t n = delta.size();
  if (v.heights.size() != n) throw std::invalid_argument("stabilize: configuration does not match window");
  for (long long x : v.heights)
    if (x < 0) throw std::invalid_argument("stabilize: negative height");
  Heights h = v.heights;
  std::vector<long long> odo(n, 0);
  std::deque<std::size_t> queue;
  std::vector<char> queued(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    if (h[i] >= delta.diag(i)) {
      queue.push_back(i);
      queued[i] = 1;
    }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    queued[i] = 0;
    const long long q = h[i] / delta.diag(i);
    if (q == 0) continue;
    h[i] -= q * delta.diag(i);
    odo[i] += q;
    for (const auto& [j, a] : delta.column(i)) {
      h[j] -= q * a;
      if (!queued[j] && h[j] >= delta.diag(j)) {
        queue.push_back(j);
        queued[j] = 1;
      }
    }
  }
  return {{v.window, std::move(h)}, std::move(odo)};
}

inline Config add(const Config& u, const Config& v, const TopplingMatrix& delta) {
  if (!delta.is_stable(u.heights) || !delta.is_stable(v.heights)) throw std::invalid_argument("add: operands must be stable");
  Config s = u;
  for (std::size_t i = 0; i < s.heights.size(); ++i) s.heights[i] += v.heights[i];
  return stabilize(s, delta).stable;
}

/// Iterative burning: a site burns once its height reaches the neighbour mass
/// still unburnt; v is recurrent iff every site burns.
inline bool is_recurrent_burning(const Config& v, const TopplingMatrix& delta, Orientation o = Orientation::Received) {
  if (!delta.is_stable(v.heights)) throw std::invalid_argument("is_recurrent_burning: configuration is not stable");
  const std::size_t n = delta.size();
  std::vector<long long> threshold(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nb = o == Orientation::Received ? delta.row(i) : delta.column(i);
    for (const auto& [j, a] : nb) threshold[i] -= a;
  }
  std::vector<char> burnt(n, 0);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i)
    if (v.heights[i] >= threshold[i]) {
      stack.push_back(i);
      burnt[i] = 1;
    }
  std::size_t count = 0;
  while (!stack.empty()) {
    const std::size_t j = stack.back();
    stack.pop_back();
    ++count;
    // sites whose threshold counted j
    const auto& nb = o == Orientation::Received ? delta.column(j) : delta.row(j);
    for (const auto& [i, a] : nb) {
      if (burnt[i]) continue;
      threshold[i] += a;
      if (v.heights[i] >= threshold[i]) {
        burnt[i] = 1;
        stack.push_back(i);
      }
    }
  }
  return count == n;
}

/// Literal intersection over all nonempty E of the sets where some i in E
/// meets its threshold N_E(i).
inline bool is_recurrent_definition(const Config& v, const TopplingMatrix& delta, Orientation o = Orientation::Received) {
  const std::size_t n = delta.size();
  if (n > 20) throw GuardError("is_recurrent_definition: window has more than 20 sites");
  if (!delta.is_stable(v.heights)) throw std::invalid_argument("is_recurrent_definition: configuration is not stable");
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    bool some = false;
    for (std::size_t i = 0; i < n && !some; ++i) {
      if (!(mask >> i & 1u)) continue;
      long long threshold = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && (mask >> j & 1u)) threshold -= o == Orientation::Received ? delta(i, j) : delta(j, i);
      if (v.heights[i] >= threshold) some = true;
    }
    if (!some) return false;
  }
  return true;
}

}  // namespace sandpile

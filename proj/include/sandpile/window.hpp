#pragma once

#include <charconv>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "laurent.hpp"

namespace sandpile {

using Site = Exponent;

/// Finite ordered set of distinct lattice sites.
class Window {
 public:
  Window(int dim, std::vector<Site> sites) : dim_(dim), sites_(std::move(sites)) {
    if (dim < 1) throw std::invalid_argument("Window: dimension must be positive");
    if (sites_.empty()) throw std::invalid_argument("Window: empty site list");
    for (std::size_t k = 0; k < sites_.size(); ++k) {
      if (static_cast<int>(sites_[k].size()) != dim) throw std::invalid_argument("Window: site dimension mismatch");
      if (!index_.emplace(sites_[k], k).second) throw std::invalid_argument("Window: duplicate site");
    }
  }

  /// Product of integer ranges [lo_k, hi_k], listed in lexicographic order.
  static Window box(const std::vector<std::pair<int, int>>& ranges) {
    if (ranges.empty()) throw std::invalid_argument("Window::box: no ranges");
    for (const auto& [lo, hi] : ranges)
      if (lo > hi) throw std::invalid_argument("Window::box: empty range");
    const int d = static_cast<int>(ranges.size());
    std::vector<Site> sites;
    Site cur(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) cur[k] = ranges[k].first;
    while (true) {
      sites.push_back(cur);
      int k = d - 1;
      while (k >= 0 && cur[k] == ranges[k].second) {
        cur[k] = ranges[k].first;
        --k;
      }
      if (k < 0) break;
      ++cur[k];
    }
    return Window(d, std::move(sites));
  }

  /// Q_M = {-M, ..., M}^d.
  static Window cube(int d, int m) { return box(std::vector<std::pair<int, int>>(static_cast<std::size_t>(d), {-m, m})); }

  /// {1, ..., n} in one dimension.
  static Window interval(int lo, int hi) { return box({{lo, hi}}); }

  int dim() const { return dim_; }
  std::size_t size() const { return sites_.size(); }
  const std::vector<Site>& sites() const { return sites_; }
  const Site& operator[](std::size_t k) const { return sites_[k]; }

  std::optional<std::size_t> index(const Site& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const Site& s) const { return index_.count(s) > 0; }

  Window translated(const Site& by) const {
    std::vector<Site> s;
    s.reserve(sites_.size());
    for (const auto& x : sites_) s.push_back(x + by);
    return Window(dim_, std::move(s));
  }

  bool operator==(const Window& o) const { return dim_ == o.dim_ && sites_ == o.sites_; }

 private:
  int dim_;
  std::vector<Site> sites_;
  std::map<Site, std::size_t> index_;
};

/// {i in F : i + supp(f) contained in F}, in the order of F; nullopt if empty.
inline std::optional<Window> interior(const Window& f_window, const LaurentPoly& f) {
  std::vector<Site> s;
  for (const auto& site : f_window.sites()) {
    bool inside = true;
    for (const auto& [e, c] : f.terms())
      if (!f_window.contains(site + e)) {
        inside = false;
        break;
      }
    if (inside) s.push_back(site);
  }
  if (s.empty()) return std::nullopt;
  return Window(f_window.dim(), std::move(s));
}

namespace detail {

inline std::optional<int> parse_int(const std::string& s) {
  int v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last || first == last) return std::nullopt;
  return v;
}

}  // namespace detail

/// Parses "box:d=1:1..5" or "box:d=2:-2..2,-2..2".
inline Window parse_window_spec(const std::string& spec) {
  auto fail = [&](const std::string& msg) { return std::invalid_argument("window spec '" + spec + "': " + msg); };
  if (spec.rfind("box:d=", 0) != 0) throw fail("expected prefix 'box:d='");
  const std::size_t colon = spec.find(':', 6);
  if (colon == std::string::npos) throw fail("missing ':' after dimension");
  const auto d = detail::parse_int(spec.substr(6, colon - 6));
  if (!d || *d < 1) throw fail("bad dimension");
  std::vector<std::pair<int, int>> ranges;
  const std::string rest = spec.substr(colon + 1);
  std::size_t start = 0;
  while (start <= rest.size()) {
    std::size_t comma = rest.find(',', start);
    if (comma == std::string::npos) comma = rest.size();
    const std::string part = rest.substr(start, comma - start);
    const std::size_t dots = part.find("..");
    if (dots == std::string::npos) throw fail("range '" + part + "' lacks '..'");
    const auto lo = detail::parse_int(part.substr(0, dots));
    const auto hi = detail::parse_int(part.substr(dots + 2));
    if (!lo || !hi) throw fail("bad range '" + part + "'");
    if (*lo > *hi) throw fail("empty range '" + part + "'");
    ranges.emplace_back(*lo, *hi);
    start = comma + 1;
  }
  if (static_cast<int>(ranges.size()) != *d) throw fail("expected " + std::to_string(*d) + " ranges");
  return Window::box(ranges);
}

}  // namespace sandpile

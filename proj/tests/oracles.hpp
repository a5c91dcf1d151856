#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include <sandpile/group.hpp>
#include <sandpile/toppling.hpp>

namespace oracle {

using sandpile::Config;
using sandpile::Heights;
using sandpile::TopplingMatrix;

/// Topples one uniformly chosen unstable site at a time until stable.
inline sandpile::StabilizationResult stabilize_random_order(const Config& v, const TopplingMatrix& delta, std::mt19937_64& rng) {
  Config cur = v;
  std::vector<long long> odo(delta.size(), 0);
  std::vector<std::size_t> unstable;
  while (true) {
    unstable.clear();
    for (std::size_t i = 0; i < delta.size(); ++i)
      if (cur.heights[i] >= delta.diag(i)) unstable.push_back(i);
    if (unstable.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, unstable.size() - 1);
    const std::size_t i = unstable[pick(rng)];
    cur = sandpile::topple(cur, i, delta);
    ++odo[i];
  }
  return {cur, odo};
}

/// The recurrent class as the ideal {S(v_max + s) : s stable}.
inline std::set<Heights> recurrent_by_ideal(const TopplingMatrix& delta) {
  std::set<Heights> out;
  const Config vmax = delta.v_max();
  sandpile::for_each_stable(delta, [&](const Heights& s) {
    Config c = vmax;
    for (std::size_t i = 0; i < s.size(); ++i) c.heights[i] += s[i];
    out.insert(sandpile::stabilize(c, delta).stable.heights);
  });
  return out;
}

inline Heights random_heights(const TopplingMatrix& delta, std::mt19937_64& rng, long long scale) {
  Heights h(delta.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    std::uniform_int_distribution<long long> d(0, scale * delta.diag(i));
    h[i] = d(rng);
  }
  return h;
}

inline Heights random_stable(const TopplingMatrix& delta, std::mt19937_64& rng) {
  Heights h(delta.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    std::uniform_int_distribution<long long> d(0, delta.diag(i) - 1);
    h[i] = d(rng);
  }
  return h;
}

/// Random connected-ish window: a random walk of distinct sites.
inline sandpile::Window random_window(std::mt19937_64& rng, int dim, std::size_t n) {
  std::vector<sandpile::Site> sites{sandpile::Site(static_cast<std::size_t>(dim), 0)};
  std::set<sandpile::Site> seen(sites.begin(), sites.end());
  std::uniform_int_distribution<int> axis(0, dim - 1), step(0, 1), jump(0, 3);
  while (sites.size() < n) {
    std::uniform_int_distribution<std::size_t> from(0, sites.size() - 1);
    sandpile::Site s = sites[from(rng)];
    s[static_cast<std::size_t>(axis(rng))] += step(rng) ? 1 + (jump(rng) == 0) : -1;
    if (seen.insert(s).second) sites.push_back(s);
  }
  return sandpile::Window(dim, sites);
}

}  // namespace oracle

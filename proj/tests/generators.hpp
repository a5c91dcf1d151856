#pragma once

#include <random>
#include <vector>

#include <sandpile/laurent.hpp>

namespace testgen {

/// Random sandpile polynomial: a few negative coefficients in a small box,
/// dominant coefficient at the origin exceeding their total mass.
inline sandpile::LaurentPoly random_sandpile(std::mt19937_64& rng, int dim, int radius = 2, int max_terms = 4) {
  std::uniform_int_distribution<int> pos(-radius, radius), coef(1, 3), count(1, max_terms), slack(1, 3);
  sandpile::LaurentPoly g(dim);
  long long mass = 0;
  const int terms = count(rng);
  for (int t = 0; t < terms; ++t) {
    sandpile::Exponent e(static_cast<std::size_t>(dim));
    for (auto& x : e) x = pos(rng);
    if (sandpile::is_origin(e)) continue;
    const int c = coef(rng);
    g.add_term(e, -c);
    mass += c;
  }
  if (mass == 0) {
    sandpile::Exponent e(static_cast<std::size_t>(dim), 0);
    e[0] = 1;
    g.add_term(e, -1);
    mass = 1;
  }
  g.add_term(sandpile::Exponent(static_cast<std::size_t>(dim), 0), mass + slack(rng));
  return g;
}

inline sandpile::LaurentPoly random_poly(std::mt19937_64& rng, int dim, int radius = 2, int max_terms = 5) {
  std::uniform_int_distribution<int> pos(-radius, radius), coef(-5, 5), count(1, max_terms);
  sandpile::LaurentPoly p(dim);
  const int terms = count(rng);
  for (int t = 0; t < terms; ++t) {
    sandpile::Exponent e(static_cast<std::size_t>(dim));
    for (auto& x : e) x = pos(rng);
    p.add_term(e, coef(rng));
  }
  if (p.is_zero()) p.add_term(sandpile::Exponent(static_cast<std::size_t>(dim), 0), 1);
  return p;
}

}  // namespace testgen

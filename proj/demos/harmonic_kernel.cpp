// Homoclinic point of 5 - 2u - 2u^-1 against the closed form 2^-|n| / 3.

#include <cmath>
#include <cstdio>

#include <sandpile/harmonic.hpp>

int main() {
  using namespace sandpile;
  const auto k = homoclinic(parse_poly("5-2u-2u^-1"));
  std::printf("method %s, radius %d, residual %.3g\n", k.method.c_str(), k.radius, k.residual);
  for (int n = -5; n <= 5; ++n) std::printf("%3d  %.15f  %.15f\n", n, k.at({n}), std::pow(2.0, -std::abs(n)) / 3.0);
}

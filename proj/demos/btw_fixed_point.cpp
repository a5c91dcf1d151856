// Drops grains on the one-dimensional BTW product model and prints the state
// the dynamics settles into.

#include <iostream>
#include <random>

#include <sandpile/report.hpp>

int main(int argc, char** argv) {
  using namespace sandpile;
  const int n = argc > 1 ? std::stoi(argv[1]) : 3;
  const auto m = btw_model(n);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> site(0, n - 1);
  Config v{m.window, Heights(static_cast<std::size_t>(n), 0)};
  for (int k = 0; k < 40 * n * n; ++k) {
    ++v.heights[static_cast<std::size_t>(site(rng))];
    v = btw_stabilize(v, m).stable;
  }
  std::cout << "w        =";
  for (auto x : v.heights) std::cout << ' ' << x;
  std::cout << "\nDelta^g w =";
  for (auto x : m.apply_g(v.heights)) std::cout << ' ' << x;
  std::cout << "\n|R'_F|    = " << enumerate_recurrent(m.prime()).order() << "\n";
}

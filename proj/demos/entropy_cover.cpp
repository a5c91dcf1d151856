// Entropy of the recurrent class of h = (2 - u^-1)(2 - u) and of the
// product-model images, next to the Mahler measures.

#include <cstdio>

#include <sandpile/subshift.hpp>
#include <sandpile/harmonic.hpp>

int main() {
  using namespace sandpile;
  const auto f = parse_poly("-u^-1+2"), g = parse_poly("2-u"), h = f * g;
  const auto pg = product_graphs(f, g);
  std::printf("m(h)         %.12f\n", mahler(h).value);
  std::printf("m(f)         %.12f\n", mahler(f).value);
  std::printf("entropy R    %.12f\n", graph_entropy(recurrence_graph(h)));
  std::printf("entropy V    %.12f\n", graph_entropy(pg.v));
  std::printf("entropy W    %.12f\n", graph_entropy(pg.w));
  std::printf("\n N  sites  estimate(R)\n");
  for (const auto& r : entropy_by_counting(recurrence_model(h), 10, Boundary::Free))
    std::printf("%2d  %5zu  %.6f\n", r.n, r.sites, r.estimate);
}

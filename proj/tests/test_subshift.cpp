#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <sandpile/figures.hpp>
#include <sandpile/subshift.hpp>

#include "oracles.hpp"

using namespace sandpile;

namespace {

const LaurentPoly kSym = parse_poly("5-2u-2u^-1");
const LaurentPoly kH1 = parse_poly("-2u^-2-3u^-1+8-u-u^2");
const LaurentPoly kF = parse_poly("-u^-1+2");
const LaurentPoly kG = parse_poly("2-u");
const LaurentPoly kLap2 = parse_poly("5-u1-u1^-1-u2-u2^-1");

Config word(std::initializer_list<long long> xs, int from = 1) {
  const int n = static_cast<int>(xs.size());
  return {make_window(Window::interval(from, from + n - 1)), Heights(xs)};
}

// spectral radius through a dense eigen-solver
double eigen_radius(const std::vector<std::vector<long long>>& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = static_cast<double>(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  const Eigen::VectorXcd ev = m.eigenvalues();
  double r = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) r = std::max(r, std::abs(ev(k)));
  return r;
}

// all words of length n over [0, gamma) passing burning, by exhaustive product
std::set<Word> brute_recurrent(const LaurentPoly& h, int n) {
  const auto d = toppling_matrix(h, Window::interval(1, n));
  std::set<Word> out;
  sandpile::for_each_stable(d, [&](const Heights& x) {
    if (is_recurrent_burning(d.config(x), d)) out.insert(Word(x.begin(), x.end()));
  });
  return out;
}

}  // namespace

TEST(Graph, FullShiftEntropyAndCounts) {
  const auto g = full_shift(5);
  EXPECT_NEAR(graph_entropy(g), std::log(5.0), 1e-12);
  for (std::size_t n = 1; n <= 6; ++n) EXPECT_EQ(g.count_words(n), BigInt(static_cast<long long>(std::pow(5, n))));
  const auto rows = entropy_by_counting(recurrence_model(LaurentPoly::constant(1, 3)), 5, Boundary::Free);
  for (const auto& r : rows) EXPECT_NEAR(r.estimate, std::log(3.0), 1e-12);
}

TEST(Graph, TwoByTwoOnes) {
  LabeledGraph g;
  g.add_edge("a", "a", 0);
  g.add_edge("a", "b", 1);
  g.add_edge("b", "a", 0);
  g.add_edge("b", "b", 1);
  EXPECT_NEAR(graph_entropy(g), std::log(2.0), 1e-12);
}

TEST(Graph, EntropyMatchesEigenSolverOnRandomGraphs) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    LabeledGraph g;
    const int n = 2 + static_cast<int>(rng() % 6);
    for (int v = 0; v < n; ++v) g.add_vertex(std::to_string(v));
    for (int k = 0; k < 3 * n; ++k) g.add_edge(rng() % n, rng() % n, static_cast<int>(rng() % 3));
    const auto t = g.trimmed();
    if (t.size() == 0) {
      EXPECT_THROW(graph_entropy(g), std::invalid_argument);
      continue;
    }
    EXPECT_NEAR(graph_entropy(g), std::log(eigen_radius(g.adjacency())), 1e-9);
  }
}

TEST(Graph, TrimDropsTransients) {
  LabeledGraph g;
  g.add_edge("in", "x", 0);
  g.add_edge("x", "x", 1);
  g.add_edge("x", "out", 2);
  const auto t = g.trimmed();
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.names()[0], "x");
  EXPECT_NEAR(graph_entropy(g), 0.0, 1e-12);
}

TEST(Graph, DotExportListsEveryEdge) {
  const auto g = figures::recurrent_graph();
  const auto dot = g.to_dot("R");
  std::size_t arrows = 0;
  for (std::size_t p = dot.find("->"); p != std::string::npos; p = dot.find("->", p + 1)) ++arrows;
  EXPECT_EQ(arrows, g.edges().size());
  EXPECT_EQ(dot, figures::recurrent_graph().to_dot("R"));
  EXPECT_NE(dot.find("label=\"4\""), std::string::npos);
}

TEST(Graph, CountWordsMatchesEnumeration) {
  const auto g = figures::v_graph();
  for (std::size_t n = 1; n <= 8; ++n) EXPECT_EQ(g.count_words(n), BigInt(g.words(n).size()));
}

TEST(Automaton, RecurrentLanguageMatchesBruteForce) {
  for (const auto& h : {kSym, kH1, parse_poly("-u^-1+3-u"), parse_poly("4-u-2u^-1")}) {
    const auto g = recurrence_graph(h);
    for (int n = 1; n <= 6; ++n) EXPECT_EQ(g.words(static_cast<std::size_t>(n)), brute_recurrent(h, n)) << to_string(h) << " n=" << n;
  }
}

TEST(Automaton, TrimmedLanguageKeepsEveryWord) {
  // every admissible word extends by maximal symbols, so the bi-infinite language is the same
  for (const auto& h : {kSym, kH1}) {
    const auto g = recurrence_graph(h);
    const auto t = g.trimmed();
    for (std::size_t n = 1; n <= 6; ++n) EXPECT_EQ(t.words(n), g.words(n));
  }
}

TEST(Automaton, EntropyIsMahlerMeasure) {
  EXPECT_NEAR(graph_entropy(recurrence_graph(kSym)), std::log(4.0), 1e-9);
  EXPECT_NEAR(graph_entropy(recurrence_graph(kH1)), mahler(kH1).value, 1e-9);
  EXPECT_NEAR(graph_entropy(recurrence_graph(parse_poly("-u^-1+3-u"))), mahler(parse_poly("-u^-1+3-u")).value, 1e-9);
}

TEST(Automaton, ProductGraphsMatchCofactorSearch) {
  const auto pg = product_graphs(kF, kG);
  EXPECT_EQ(pg.bound, 4);
  for (std::size_t n = 1; n <= 7; ++n) {
    EXPECT_EQ(pg.v.words(n), product_words(kF, kG, PatternKind::V, n, 5)) << n;
    EXPECT_EQ(pg.w.words(n), product_words(kF, kG, PatternKind::W, n, 5)) << n;
  }
  EXPECT_NEAR(graph_entropy(pg.v), std::log(2.0), 1e-9);
  EXPECT_NEAR(graph_entropy(pg.w), std::log(2.0), 1e-9);
}

TEST(Automaton, VWordsAreGMultiplesInRange) {
  const auto pg = product_graphs(kF, kG);
  for (const auto& u : pg.v.words(6)) {
    for (int x : u) {
      EXPECT_GE(x, 1);
      EXPECT_LE(x, 4);
    }
    for (std::size_t k = 1; k < u.size(); ++k) {
      const int y = 2 * u[k] - u[k - 1];
      EXPECT_GE(y, 0);
      EXPECT_LE(y, 4);
    }
  }
}

TEST(Admissible, ForbiddenWordExamples) {
  const auto m = recurrence_model(kSym);
  EXPECT_FALSE(pattern_admissible(word({0, 0}), m));
  EXPECT_FALSE(pattern_admissible(word({0, 2, 3, 1}), m));
  EXPECT_TRUE(pattern_admissible(word({0, 2, 4, 1}), m));
  EXPECT_TRUE(pattern_admissible(word({4, 4, 4, 4, 4}), m));
  EXPECT_THROW(pattern_admissible(word({5}), m), std::invalid_argument);
  EXPECT_THROW(pattern_admissible(word({-1}), m), std::invalid_argument);
}

TEST(Admissible, MonotoneAndShiftInvariant) {
  std::mt19937_64 rng(77);
  for (const auto& h : {kSym, kH1, kLap2}) {
    const auto m = recurrence_model(h);
    for (int trial = 0; trial < 100; ++trial) {
      const Window w = oracle::random_window(rng, h.dim(), 6);
      const auto d = toppling_matrix(h, w);
      const Config p = recurrent_representative(oracle::random_heights(d, rng, 2), d);
      ASSERT_TRUE(pattern_admissible(p, m));
      Site shift(static_cast<std::size_t>(h.dim()), 0);
      shift[0] = static_cast<int>(rng() % 11) - 5;
      EXPECT_TRUE(pattern_admissible({make_window(w.translated(shift)), p.heights}, m));
      // drop a random site
      std::vector<Site> sites = w.sites();
      const std::size_t k = rng() % sites.size();
      if (sites.size() < 2) continue;
      Heights sub = p.heights;
      sites.erase(sites.begin() + static_cast<long>(k));
      sub.erase(sub.begin() + static_cast<long>(k));
      EXPECT_TRUE(pattern_admissible({make_window(Window(h.dim(), sites)), sub}, m));
    }
    // random patterns: admissibility does not depend on translation
    for (int trial = 0; trial < 100; ++trial) {
      const Window w = oracle::random_window(rng, h.dim(), 5);
      Heights x(w.size());
      for (auto& v : x) v = static_cast<long long>(rng() % static_cast<unsigned long>(m.alphabet));
      Site shift(static_cast<std::size_t>(h.dim()), 3);
      EXPECT_EQ(pattern_admissible({make_window(w), x}, m), pattern_admissible({make_window(w.translated(shift)), x}, m));
    }
  }
}

TEST(Admissible, ProductKindsUseFiniteVolumeGroups) {
  const auto mw = product_pattern_model(PatternKind::W, kF, kG);
  const auto mv = product_pattern_model(PatternKind::V, kF, kG);
  EXPECT_EQ(mw.alphabet, 5);
  for (int n = 1; n <= 5; ++n) {
    const auto model = build_product_model(kF, kG, Window::interval(1, n));
    const auto group = enumerate_W(model);
    std::size_t w_count = 0, v_count = 0;
    for_each_stable(model.prime(), [&](const Heights& x) {
      if (pattern_admissible({model.window, x}, mw)) ++w_count;
    });
    std::vector<long long> u(static_cast<std::size_t>(n), 0);
    while (true) {
      if (pattern_admissible({model.window, u}, mv)) ++v_count;
      std::size_t k = u.size();
      while (k > 0 && u[k - 1] == 4) u[--k] = 0;
      if (k == 0) break;
      ++u[k - 1];
    }
    EXPECT_EQ(w_count, group.size());
    EXPECT_EQ(v_count, group.size());
    EXPECT_EQ(group.size(), std::size_t{1} << n);
  }
}

TEST(LocalConditions, WorkedExamples) {
  EXPECT_TRUE(local_conditions_check({2, 2, 1, 2, 2}, kF, kG));
  EXPECT_FALSE(local_conditions_check({3, 4, 4}, kF, kG));
  EXPECT_TRUE(local_conditions_check({2, 2, 2, 2, 2, 2}, kF, kG));
  EXPECT_FALSE(local_conditions_check({3, 2, 1, 2}, kF, kG));
  EXPECT_FALSE(local_conditions_check({0, 2}, kF, kG));
  EXPECT_THROW(local_conditions_check({2}, kSym, kG), std::invalid_argument);
}

TEST(LocalConditions, NecessaryForV) {
  const auto pg = product_graphs(kF, kG);
  for (std::size_t n = 1; n <= 9; ++n)
    for (const auto& u : pg.v.words(n)) EXPECT_TRUE(local_conditions_check(std::vector<long long>(u.begin(), u.end()), kF, kG));
}

TEST(Counting, RecurrentDecreasesTowardLogFour) {
  const auto rows = entropy_by_counting(recurrence_model(kSym), 12, Boundary::Free);
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_LE(rows[k].estimate, rows[k - 1].estimate + 1e-12);
  EXPECT_LT(std::abs(rows.back().estimate - std::log(4.0)) / std::log(4.0), 0.05);
  // word counts agree with determinants on intervals
  for (int n = 0; n <= 3; ++n) {
    const auto d = toppling_matrix(kSym, Window::interval(-n, n));
    EXPECT_EQ(rows[static_cast<std::size_t>(n)].count, abs(determinant(d.matrix())));
  }
  const auto collar = entropy_by_counting(recurrence_model(kSym), 6, Boundary::Collar);
  for (std::size_t k = 0; k < collar.size(); ++k) EXPECT_EQ(collar[k].count, rows[k].count);
}

TEST(Counting, WTowardLogTwo) {
  const auto rows = entropy_by_counting(product_pattern_model(PatternKind::W, kF, kG), 14, Boundary::Free);
  EXPECT_LT(std::abs(rows.back().estimate - std::log(2.0)) / std::log(2.0), 0.10);
  const auto v = entropy_by_counting(product_pattern_model(PatternKind::V, kF, kG), 8, Boundary::Free);
  EXPECT_LT(std::abs(v.back().estimate - std::log(2.0)) / std::log(2.0), 0.10);
  // words of g*u also see the site left of the window, so the counts differ
  EXPECT_EQ(v[0].count, 4);
  EXPECT_EQ(rows[0].count, 5);
}

TEST(Counting, AgreesWithGraphEntropy) {
  const auto rows = entropy_by_counting(recurrence_model(kH1), 12, Boundary::Free);
  EXPECT_LT(std::abs(rows.back().estimate - graph_entropy(recurrence_graph(kH1))) / graph_entropy(recurrence_graph(kH1)), 0.05);
}

TEST(Counting, TwoDimensionalAgainstDeterminant) {
  const auto rows = entropy_by_counting(recurrence_model(kLap2), 1, Boundary::Free);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].count, 5);
  EXPECT_EQ(rows[1].count, abs(determinant(toppling_matrix(kLap2, Window::cube(2, 1)).matrix())));
  const auto collar = entropy_by_counting(recurrence_model(kLap2), 1, Boundary::Collar);
  EXPECT_EQ(collar[1].count, rows[1].count);
  EXPECT_THROW(entropy_by_counting(recurrence_model(kLap2), 2, Boundary::Free, 1000), GuardError);
  EXPECT_THROW(entropy_by_counting(product_pattern_model(PatternKind::W, parse_poly("3+u1+u2", 2), parse_poly("3-u1-u2", 2)), 1, Boundary::Free),
               std::invalid_argument);
}

TEST(Counting, CsvFormat) {
  const auto rows = entropy_by_counting(recurrence_model(kSym), 2, Boundary::Free);
  const auto csv = to_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "N,sites,count,estimate");
  EXPECT_NE(csv.find("\n0,1,5,1.609437912434\n"), std::string::npos);
}

TEST(Distinctness, CollarDeterminesCoreModuloF) {
  const auto rep = collar_distinctness(kF, kG, 2, 6);
  EXPECT_GT(rep.patterns, 1000u);
  EXPECT_GT(rep.pairs, 0u);
  EXPECT_EQ(rep.violations, 0u);
}

TEST(Distinctness, ResidueDetectsMultiples) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> c(-4, 4);
  for (const auto& f : {kF, parse_poly("3-u-u^2"), parse_poly("-u^-1+3-u")}) {
    for (int trial = 0; trial < 50; ++trial) {
      Word a(6), q(3);
      for (auto& x : a) x = c(rng);
      for (auto& x : q) x = c(rng);
      // b = a + f * q, aligned so that f * q fits in the same 6 slots
      LaurentPoly qp(1);
      for (int k = 0; k < 3; ++k) qp.add_term({k - f.bounding_box().first[0]}, q[static_cast<std::size_t>(k)]);
      const auto fq = f * qp;
      Word b = a;
      bool fits = true;
      for (const auto& [e, v] : fq.terms()) {
        if (e[0] < 0 || e[0] >= 6) fits = false;
        else b[static_cast<std::size_t>(e[0])] += static_cast<int>(v);
      }
      ASSERT_TRUE(fits);
      EXPECT_EQ(detail::residue_mod(a, f), detail::residue_mod(b, f));
      Word d = a;
      d[0] += 1;
      EXPECT_NE(detail::residue_mod(a, f), detail::residue_mod(d, f));
    }
  }
}

TEST(Figures, RecurrentGraphMatrix) {
  const auto g = figures::recurrent_graph();
  const auto a = g.adjacency();
  const std::vector<std::vector<long long>> expect{{3, 2, 0}, {1, 0, 2}, {1, 0, 2}};
  EXPECT_EQ(a, expect);
  EXPECT_NEAR(graph_entropy(g), std::log(4.0), 1e-9);
  EXPECT_NEAR(graph_entropy(figures::v_graph()), std::log(2.0), 1e-9);
  EXPECT_NEAR(graph_entropy(figures::w_graph()), std::log(2.0), 1e-9);
}

TEST(Figures, Verification) {
  const auto rep = verify_figure_graphs(8);
  ASSERT_EQ(rep.checks.size(), 5u);
  const auto& r = rep.checks[0];
  const auto& v = rep.checks[1];
  const auto& w = rep.checks[2];
  const auto& fv = rep.checks[3];
  const auto& fw = rep.checks[4];
  EXPECT_TRUE(r.equal);
  EXPECT_TRUE(w.equal);
  // the V drawing misses words such as 4 2 3
  EXPECT_FALSE(v.equal);
  ASSERT_TRUE(v.direct_only.has_value());
  EXPECT_TRUE(product_graphs(kF, kG).v.accepts(*v.direct_only));
  EXPECT_TRUE(product_graphs(kF, kG).v.accepts({4, 2, 3}));
  EXPECT_FALSE(figures::v_graph().accepts({4, 2, 3}));
  // finite-volume drawings have half the group
  EXPECT_FALSE(fv.equal);
  EXPECT_FALSE(fw.equal);
  EXPECT_EQ(fw.first_mismatch, 2u);
  for (std::size_t n = 1; n < fw.counts.size(); ++n) {
    EXPECT_EQ(fw.counts[n].second, std::size_t{1} << (n + 1));
    EXPECT_EQ(fw.counts[n].first, std::size_t{1} << n);
    EXPECT_EQ(fv.counts[n], fw.counts[n]);
  }
  EXPECT_FALSE(rep.all_equal());
}

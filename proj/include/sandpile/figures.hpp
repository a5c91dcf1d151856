#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "product.hpp"
#include "subshift.hpp"

namespace sandpile {

/// Hand transcriptions of reference graph drawings for the worked
/// example h = -2u^-1 + 5 - 2u = (2 - u^-1)(2 - u). Nothing else in the
/// library relies on them; verify_figure_graphs checks them against
/// enumeration.
namespace figures {

inline LabeledGraph recurrent_graph() {
  LabeledGraph g;
  for (int l : {2, 3, 4}) g.add_edge("1", "1", l);
  for (int l : {0, 1}) g.add_edge("1", "2", l);
  g.add_edge("2", "1", 4);
  for (int l : {2, 3}) g.add_edge("2", "3", l);
  for (int l : {2, 3}) g.add_edge("3", "3", l);
  g.add_edge("3", "1", 4);
  return g;
}

inline LabeledGraph v_graph() {
  LabeledGraph g;
  g.add_edge("A", "A", 2);
  g.add_edge("C", "C", 2);
  g.add_edge("B", "B", 3);
  g.add_edge("D", "D", 4);
  g.add_edge("A", "C", 1);
  g.add_edge("B", "C", 3);
  g.add_edge("C", "B", 2);
  g.add_edge("D", "C", 2);
  g.add_edge("D", "B", 3);
  return g;
}

inline LabeledGraph w_graph() {
  LabeledGraph g;
  g.add_edge("E", "E", 2);
  g.add_edge("C", "C", 2);
  g.add_edge("B", "B", 3);
  g.add_edge("D", "D", 4);
  g.add_edge("A", "C", 3);
  g.add_edge("B", "C", 1);
  g.add_edge("C", "B", 4);
  g.add_edge("E", "A", 0);
  g.add_edge("D", "C", 0);
  g.add_edge("D", "B", 2);
  return g;
}

inline LabeledGraph finite_v_graph() {
  LabeledGraph g;
  g.add_start(g.add_vertex("*"));
  for (int l : {0, 1}) g.add_edge("*", "C", l);
  g.add_edge("C", "C", 2);
  g.add_edge("C", "B", 2);
  g.add_edge("B", "B", 3);
  g.add_edge("B", "C", 3);
  return g;
}

inline LabeledGraph finite_w_graph() {
  LabeledGraph g;
  g.add_start(g.add_vertex("*"));
  g.add_edge("*", "H", 0);
  g.add_edge("*", "I", 2);
  g.add_edge("I", "F", 3);
  g.add_edge("H", "F", 4);
  g.add_edge("F", "F", 2);
  g.add_edge("F", "G", 4);
  g.add_edge("G", "G", 3);
  g.add_edge("G", "F", 1);
  return g;
}

inline LaurentPoly f() { return parse_poly("-u^-1+2"); }
inline LaurentPoly g() { return parse_poly("2-u"); }

}  // namespace figures

struct FigureCheck {
  std::string name;
  std::string description;
  LabeledGraph graph;
  double entropy = 0.0;  // NaN for start-vertex graphs
  bool equal = true;
  std::vector<std::pair<std::size_t, std::size_t>> counts;  // (graph, direct) per length 1..n_max
  std::optional<std::size_t> first_mismatch;
  std::optional<Word> graph_only, direct_only;
};

struct FigureReport {
  std::vector<FigureCheck> checks;
  int n_max = 0;
  int margin = 0;

  bool all_equal() const {
    for (const auto& c : checks)
      if (!c.equal) return false;
    return true;
  }
};

namespace detail {

inline void compare_sets(FigureCheck& c, std::size_t n, const std::set<Word>& from_graph, const std::set<Word>& direct) {
  c.counts.emplace_back(from_graph.size(), direct.size());
  if (from_graph == direct) return;
  c.equal = false;
  if (c.first_mismatch) return;
  c.first_mismatch = n;
  for (const auto& w : from_graph)
    if (!direct.count(w)) {
      c.graph_only = w;
      break;
    }
  for (const auto& w : direct)
    if (!from_graph.count(w)) {
      c.direct_only = w;
      break;
    }
}

/// Streams the burning-admissible words through the graph instead of
/// materialising both languages.
inline void compare_recurrent(FigureCheck& c, const LaurentPoly& h, const LabeledGraph& g, std::size_t n) {
  const long long gamma = static_cast<long long>(h.coeff({0}));
  std::vector<TopplingMatrix> prefix;
  for (std::size_t k = 1; k <= n; ++k) prefix.push_back(toppling_matrix(h, Window::interval(1, static_cast<int>(k))));
  std::size_t direct = 0;
  std::optional<Word> missing;
  Heights cur;
  std::function<void(const LabeledGraph::VertexSet&)> rec = [&](const LabeledGraph::VertexSet& states) {
    if (cur.size() == n) {
      ++direct;
      if (states.empty() && !missing) missing = Word(cur.begin(), cur.end());
      return;
    }
    const auto next = g.step(states);
    for (long long x = 0; x < gamma; ++x) {
      cur.push_back(x);
      const auto& m = prefix[cur.size() - 1];
      if (is_recurrent_burning({m.window(), cur}, m)) {
        auto it = next.find(static_cast<int>(x));
        rec(it == next.end() ? LabeledGraph::VertexSet{} : it->second);
      }
      cur.pop_back();
    }
  };
  rec(g.initial_set());
  const BigInt graph_count = g.count_words(n);
  c.counts.emplace_back(static_cast<std::size_t>(graph_count), direct);
  std::optional<Word> extra;
  if (graph_count != BigInt(direct) || missing) {
    // a graph word failing burning, if any
    for (const auto& w : g.words(n)) {
      const auto& m = prefix[n - 1];
      if (!is_recurrent_burning({m.window(), Heights(w.begin(), w.end())}, m)) {
        extra = w;
        break;
      }
    }
  }
  if (!missing && !extra) return;
  c.equal = false;
  if (c.first_mismatch) return;
  c.first_mismatch = n;
  c.direct_only = missing;
  c.graph_only = extra;
}

}  // namespace detail

/// Cross-checks each transcribed figure against first-principles enumeration
/// for word lengths 1..n_max: burning for the recurrent graph, bounded
/// cofactor search with `margin` extra sites on each side for the V and W
/// graphs, and the finite-volume groups V_F, W_F on F = {1..N} for the
/// start-vertex graphs.
inline FigureReport verify_figure_graphs(int n_max = 10, int margin = 4) {
  FigureReport rep;
  rep.n_max = n_max;
  rep.margin = margin;
  const LaurentPoly f = figures::f(), g = figures::g(), h = f * g;

  auto check = [](std::string name, std::string description, LabeledGraph graph) {
    FigureCheck c;
    c.name = std::move(name);
    c.description = std::move(description);
    c.graph = std::move(graph);
    return c;
  };
  FigureCheck r = check("figure1", "recurrent configurations R of h", figures::recurrent_graph());
  FigureCheck v = check("figure2", "V_g^(h), labels u", figures::v_graph());
  FigureCheck w = check("figure3", "W_g^(h), labels g*u", figures::w_graph());
  FigureCheck fv = check("figure4-left", "V_F on F = {1..N}, paths from the start vertex", figures::finite_v_graph());
  FigureCheck fw = check("figure4-right", "W_F on F = {1..N}, paths from the start vertex", figures::finite_w_graph());
  for (auto* c : {&r, &v, &w}) c->entropy = graph_entropy(c->graph);
  for (auto* c : {&fv, &fw}) c->entropy = std::numeric_limits<double>::quiet_NaN();

  for (int n = 1; n <= n_max; ++n) {
    const auto len = static_cast<std::size_t>(n);
    detail::compare_recurrent(r, h, r.graph, len);
    detail::compare_sets(v, len, v.graph.words(len), product_words(f, g, PatternKind::V, len, margin));
    detail::compare_sets(w, len, w.graph.words(len), product_words(f, g, PatternKind::W, len, margin));
    const auto model = build_product_model(f, g, Window::interval(1, n));
    const auto group = enumerate_W(model, WStrategy::GeneratorClosure);
    std::set<Word> vf, wf;
    for (const auto& x : group.elements_v) vf.insert(Word(x.begin(), x.end()));
    for (const auto& x : group.elements_w) wf.insert(Word(x.begin(), x.end()));
    detail::compare_sets(fv, len, fv.graph.words(len), vf);
    detail::compare_sets(fw, len, fw.graph.words(len), wf);
  }
  rep.checks = {std::move(r), std::move(v), std::move(w), std::move(fv), std::move(fw)};
  return rep;
}

}  // namespace sandpile

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "exact.hpp"
#include "harmonic.hpp"
#include "laurent.hpp"
#include "product.hpp"
#include "toppling.hpp"
#include "window.hpp"

namespace sandpile {

using Word = std::vector<int>;

/// Directed graph with symbol-labelled edges. Without start vertices it
/// presents the labels of bi-infinite paths; with them, path languages
/// beginning at a start vertex.
class LabeledGraph {
 public:
  struct Edge {
    std::size_t source, target;
    int label;
    bool operator<(const Edge& o) const { return std::tie(source, target, label) < std::tie(o.source, o.target, o.label); }
    bool operator==(const Edge& o) const { return source == o.source && target == o.target && label == o.label; }
  };

  std::size_t add_vertex(const std::string& name) {
    if (auto it = index_.find(name); it != index_.end()) return it->second;
    index_.emplace(name, names_.size());
    names_.push_back(name);
    out_.emplace_back();
    return names_.size() - 1;
  }

  std::size_t vertex(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("LabeledGraph: unknown vertex " + name);
    return it->second;
  }

  void add_edge(std::size_t s, std::size_t t, int label) {
    if (s >= size() || t >= size()) throw std::out_of_range("LabeledGraph: vertex out of range");
    edges_.push_back({s, t, label});
    out_[s].push_back(edges_.size() - 1);
  }

  void add_edge(const std::string& s, const std::string& t, int label) { add_edge(add_vertex(s), add_vertex(t), label); }

  void add_start(std::size_t v) {
    if (!std::count(start_.begin(), start_.end(), v)) start_.push_back(v);
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& start() const { return start_; }

  std::set<int> labels() const {
    std::set<int> s;
    for (const auto& e : edges_) s.insert(e.label);
    return s;
  }

  /// Count matrix: entry (s,t) is the number of edges s -> t.
  std::vector<std::vector<long long>> adjacency() const {
    std::vector<std::vector<long long>> a(size(), std::vector<long long>(size(), 0));
    for (const auto& e : edges_) ++a[e.source][e.target];
    return a;
  }

  /// Subgraph on the vertices lying on some bi-infinite path; start vertices are dropped.
  LabeledGraph trimmed() const {
    std::vector<char> alive(size(), 1);
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<int> in(size(), 0), out(size(), 0);
      for (const auto& e : edges_)
        if (alive[e.source] && alive[e.target]) {
          ++out[e.source];
          ++in[e.target];
        }
      for (std::size_t v = 0; v < size(); ++v)
        if (alive[v] && (in[v] == 0 || out[v] == 0)) {
          alive[v] = 0;
          changed = true;
        }
    }
    LabeledGraph g;
    for (std::size_t v = 0; v < size(); ++v)
      if (alive[v]) g.add_vertex(names_[v]);
    for (const auto& e : edges_)
      if (alive[e.source] && alive[e.target]) g.add_edge(g.vertex(names_[e.source]), g.vertex(names_[e.target]), e.label);
    return g;
  }

  using VertexSet = std::vector<std::size_t>;

  VertexSet initial_set() const {
    if (!start_.empty()) {
      VertexSet s = start_;
      std::sort(s.begin(), s.end());
      return s;
    }
    VertexSet s(size());
    for (std::size_t v = 0; v < size(); ++v) s[v] = v;
    return s;
  }

  /// Successor sets by label (subset construction step).
  std::map<int, VertexSet> step(const VertexSet& from) const {
    std::map<int, std::set<std::size_t>> acc;
    for (std::size_t v : from)
      for (std::size_t k : out_[v]) acc[edges_[k].label].insert(edges_[k].target);
    std::map<int, VertexSet> out;
    for (auto& [l, s] : acc) out.emplace(l, VertexSet(s.begin(), s.end()));
    return out;
  }

  VertexSet read(VertexSet from, const Word& w) const {
    for (int x : w) {
      auto next = step(from);
      auto it = next.find(x);
      if (it == next.end()) return {};
      from = std::move(it->second);
    }
    return from;
  }

  bool accepts(const Word& w) const { return !read(initial_set(), w).empty(); }

  /// Distinct label words of length n.
  std::set<Word> words(std::size_t n) const {
    std::set<Word> out;
    Word cur;
    std::function<void(const VertexSet&)> rec = [&](const VertexSet& s) {
      if (cur.size() == n) {
        out.insert(cur);
        return;
      }
      for (const auto& [l, t] : step(s)) {
        cur.push_back(l);
        rec(t);
        cur.pop_back();
      }
    };
    if (size() > 0) rec(initial_set());
    return out;
  }

  /// Number of distinct words w of length n such that prefix + w + suffix is
  /// a path label from the initial set.
  BigInt count_words(std::size_t n, const Word& prefix = {}, const Word& suffix = {}) const {
    if (size() == 0) return 0;
    const VertexSet init = read(initial_set(), prefix);
    if (init.empty()) return 0;
    std::map<VertexSet, BigInt> layer{{init, 1}};
    for (std::size_t k = 0; k < n; ++k) {
      std::map<VertexSet, BigInt> next;
      for (const auto& [s, c] : layer)
        for (auto& [l, t] : step(s)) next[std::move(t)] += c;
      layer = std::move(next);
    }
    BigInt total = 0;
    for (const auto& [s, c] : layer)
      if (suffix.empty() || !read(s, suffix).empty()) total += c;
    return total;
  }

  std::string to_dot(const std::string& name = "G") const {
    std::string s = "digraph " + name + " {\n";
    for (std::size_t v = 0; v < size(); ++v) {
      s += "  v" + std::to_string(v) + " [label=\"" + names_[v] + "\"";
      if (std::count(start_.begin(), start_.end(), v)) s += ", shape=doublecircle";
      s += "];\n";
    }
    std::vector<Edge> sorted = edges_;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& e : sorted)
      s += "  v" + std::to_string(e.source) + " -> v" + std::to_string(e.target) + " [label=\"" + std::to_string(e.label) + "\"];\n";
    return s + "}\n";
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::size_t> start_;
};

namespace detail {

/// Strongly connected components (Tarjan), each with at least one internal edge.
inline std::vector<std::vector<std::size_t>> cyclic_components(const std::vector<std::vector<long long>>& a) {
  const std::size_t n = a.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> comps;
  int counter = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on[v] = 1;
    for (std::size_t w = 0; w < n; ++w) {
      if (!a[v][w]) continue;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on[w] = 0;
        comp.push_back(w);
      } while (w != v);
      bool cyclic = comp.size() > 1 || a[v][v] > 0;
      if (cyclic) {
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (index[v] < 0) visit(v);
  std::sort(comps.begin(), comps.end());
  return comps;
}

/// Perron root of an irreducible nonnegative matrix: power iteration on A + I
/// bracketed by Collatz-Wielandt bounds.
inline double perron_root(const std::vector<std::vector<long long>>& a, double tol = 1e-13) {
  const std::size_t n = a.size();
  std::vector<double> x(n, 1.0), y(n);
  double lo = 0.0, hi = 0.0;
  for (int it = 0; it < 1000000; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x[i];
      for (std::size_t j = 0; j < n; ++j) s += static_cast<double>(a[i][j]) * x[j];
      y[i] = s;
    }
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lo = std::min(lo, y[i] / x[i]);
      hi = std::max(hi, y[i] / x[i]);
      norm = std::max(norm, y[i]);
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    if (hi - lo <= tol * hi) break;
  }
  return 0.5 * (lo + hi) - 1.0;
}

}  // namespace detail

/// log of the spectral radius over the cyclic components of the trimmed graph.
inline double graph_entropy(const LabeledGraph& g) {
  const LabeledGraph t = g.trimmed();
  if (t.size() == 0) throw std::invalid_argument("graph_entropy: graph has no bi-infinite path");
  const auto a = t.adjacency();
  double best = 0.0;
  for (const auto& comp : detail::cyclic_components(a)) {
    std::vector<std::vector<long long>> sub(comp.size(), std::vector<long long>(comp.size()));
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (std::size_t j = 0; j < comp.size(); ++j) sub[i][j] = a[comp[i]][comp[j]];
    best = std::max(best, detail::perron_root(sub));
  }
  return std::log(best);
}

inline LabeledGraph full_shift(int symbols) {
  if (symbols < 1) throw std::invalid_argument("full_shift: need at least one symbol");
  LabeledGraph g;
  g.add_vertex("*");
  for (int s = 0; s < symbols; ++s) g.add_edge(0, 0, s);
  return g;
}

/// Deterministic automaton over {0..alphabet-1}; next[q][y] = -1 when the
/// word read so far becomes inadmissible.
struct Dfa {
  int alphabet = 0;
  std::size_t start = 0;
  std::vector<std::vector<int>> next;

  std::size_t size() const { return next.size(); }

  LabeledGraph graph() const {
    LabeledGraph g;
    for (std::size_t q = 0; q < size(); ++q) g.add_vertex("q" + std::to_string(q));
    for (std::size_t q = 0; q < size(); ++q)
      for (int y = 0; y < alphabet; ++y)
        if (next[q][static_cast<std::size_t>(y)] >= 0) g.add_edge(q, static_cast<std::size_t>(next[q][static_cast<std::size_t>(y)]), y);
    g.add_start(start);
    return g;
  }
};

namespace detail {

inline int support_radius_1d(const LaurentPoly& h) {
  int r = 0;
  for (const auto& [e, c] : h.terms()) r = std::max(r, std::abs(e[0]));
  return r;
}

/// Moore partition refinement; dead transitions act as a distinguished sink.
inline Dfa minimize(const Dfa& d) {
  const std::size_t n = d.size();
  std::vector<int> cls(n, 0);
  std::size_t classes = 1;
  while (true) {
    std::map<std::vector<int>, int> sig;
    std::vector<int> next_cls(n);
    for (std::size_t q = 0; q < n; ++q) {
      std::vector<int> key{cls[q]};
      for (int t : d.next[q]) key.push_back(t < 0 ? -1 : cls[static_cast<std::size_t>(t)]);
      next_cls[q] = sig.emplace(std::move(key), static_cast<int>(sig.size())).first->second;
    }
    const std::size_t now = sig.size();
    cls = std::move(next_cls);
    if (now == classes) break;
    classes = now;
  }
  // renumber by first occurrence in BFS from start for stable ids
  std::vector<int> id(classes, -1);
  std::deque<std::size_t> queue{d.start};
  std::vector<std::size_t> rep;
  id[static_cast<std::size_t>(cls[d.start])] = 0;
  rep.push_back(d.start);
  while (!queue.empty()) {
    const std::size_t q = queue.front();
    queue.pop_front();
    for (int t : d.next[q]) {
      if (t < 0) continue;
      auto& slot = id[static_cast<std::size_t>(cls[static_cast<std::size_t>(t)])];
      if (slot < 0) {
        slot = static_cast<int>(rep.size());
        rep.push_back(static_cast<std::size_t>(t));
        queue.push_back(static_cast<std::size_t>(t));
      }
    }
  }
  Dfa m;
  m.alphabet = d.alphabet;
  m.start = 0;
  m.next.assign(rep.size(), std::vector<int>(static_cast<std::size_t>(d.alphabet), -1));
  for (std::size_t k = 0; k < rep.size(); ++k)
    for (int y = 0; y < d.alphabet; ++y) {
      const int t = d.next[rep[k]][static_cast<std::size_t>(y)];
      if (t >= 0) m.next[k][static_cast<std::size_t>(y)] = id[static_cast<std::size_t>(cls[static_cast<std::size_t>(t)])];
    }
  return m;
}

}  // namespace detail

/// Automaton for the words on which the burning test succeeds, for a
/// one-variable sandpile polynomial. It guesses a finite set E of sites and
/// checks, r sites behind the reading head, that every chosen site stays
/// below the mass it receives from E; a word is rejected once some guess
/// completes to a forbidden set.
inline Dfa recurrence_dfa(const LaurentPoly& h) {
  if (h.dim() != 1) throw std::invalid_argument("recurrence_dfa: one variable only");
  const auto cls = classify(h);
  if (!cls.sandpile) throw std::invalid_argument("recurrence_dfa: " + to_string(h) + " is not a sandpile polynomial");
  const int r = detail::support_radius_1d(h);
  const int gamma = static_cast<int>(h.coeff({0}));
  std::vector<long long> c(static_cast<std::size_t>(2 * r + 1), 0);
  for (const auto& [e, v] : h.terms())
    if (e[0] != 0) c[static_cast<std::size_t>(e[0] + r)] = -static_cast<long long>(v);

  // NFA state: [phase, bits of the last 2r sites..., heights of the last r sites (-1 if not in E)...]
  using State = std::vector<int>;
  const std::size_t nb = static_cast<std::size_t>(2 * r), ny = static_cast<std::size_t>(r);
  State idle_state(1 + nb + ny, 0);
  std::fill(idle_state.begin() + 1 + static_cast<long>(nb), idle_state.end(), -1);

  // threshold of the site at position q of a bit window, bits outside read as 0
  auto threshold = [&](const std::vector<int>& bits, int q) {
    long long t = 0;
    for (int k = -r; k <= r; ++k) {
      if (k == 0) continue;
      const int p = q - k;
      if (p >= 0 && p < static_cast<int>(bits.size()) && bits[static_cast<std::size_t>(p)]) t += c[static_cast<std::size_t>(k + r)];
    }
    return t;
  };

  struct Step {
    std::set<State> next;
    bool closed = false;
  };
  auto advance = [&](const State& s, int y) {
    Step out;
    for (int b = 0; b <= 1; ++b) {
      const int phase = s[0] || b;
      if (!phase) {
        out.next.insert(idle_state);
        continue;
      }
      std::vector<int> bits(s.begin() + 1, s.begin() + 1 + static_cast<long>(nb));
      bits.push_back(b);
      std::vector<int> ys(s.begin() + 1 + static_cast<long>(nb), s.end());
      ys.push_back(b ? y : -1);
      // site r positions back now has its full neighbourhood
      if (bits[static_cast<std::size_t>(r)] && ys[0] >= threshold(bits, r)) continue;
      State t(1 + nb + ny);
      t[0] = 1;
      for (std::size_t k = 0; k < nb; ++k) t[1 + k] = bits[k + 1];
      for (std::size_t k = 0; k < ny; ++k) t[1 + nb + k] = ys[k + 1];
      // close E here: later sites are outside, pending sites must all fail
      std::vector<int> tb(t.begin() + 1, t.begin() + 1 + static_cast<long>(nb));
      bool closable = true;
      for (int m = 0; m < r && closable; ++m) {
        const int q = r + m;
        if (tb[static_cast<std::size_t>(q)] && t[1 + nb + static_cast<std::size_t>(m)] >= threshold(tb, q)) closable = false;
      }
      if (closable) {
        out.closed = true;
        return out;
      }
      out.next.insert(std::move(t));
    }
    return out;
  };

  Dfa d;
  d.alphabet = gamma;
  std::map<std::set<State>, std::size_t> ids;
  std::vector<std::set<State>> subsets;
  auto intern = [&](std::set<State> s) {
    auto [it, fresh] = ids.emplace(s, subsets.size());
    if (fresh) {
      subsets.push_back(std::move(s));
      d.next.emplace_back(static_cast<std::size_t>(gamma), -1);
    }
    return it->second;
  };
  intern({idle_state});
  for (std::size_t q = 0; q < subsets.size(); ++q) {
    if (subsets.size() > 2000000) throw GuardError("recurrence_dfa: subset construction exceeds guard");
    for (int y = 0; y < gamma; ++y) {
      std::set<State> next;
      bool dead = false;
      for (const auto& s : subsets[q]) {
        auto st = advance(s, y);
        if (st.closed) {
          dead = true;
          break;
        }
        next.insert(st.next.begin(), st.next.end());
      }
      if (!dead) {
        const std::size_t t = intern(std::move(next));
        d.next[q][static_cast<std::size_t>(y)] = static_cast<int>(t);
      }
    }
  }
  return detail::minimize(d);
}

/// Graph whose labels read from the start vertex are exactly the words passing
/// the burning test; trimmed, it presents the infinite-volume recurrent class.
inline LabeledGraph recurrence_graph(const LaurentPoly& h) { return recurrence_dfa(h).graph(); }

/// Bound on |u| for bounded u with g*u taking values in [0, top].
inline long long cofactor_bound(const LaurentPoly& g, long long top) {
  const auto k = homoclinic(g);
  double l1 = 0.0;
  for (double v : k.values) l1 += std::abs(v);
  return static_cast<long long>(std::floor(l1 * static_cast<double>(top) + 1e-9));
}

/// Presentations of V_g^(h) (labels u) and W_g^(h) = g V_g^(h) (labels g*u)
/// for one-variable f, g with fg a sandpile polynomial. Both graphs share
/// vertices (recent u values, recurrence-automaton state) and are trimmed.
struct ProductGraphs {
  LabeledGraph v, w;
  long long bound = 0;
};

inline ProductGraphs product_graphs(const LaurentPoly& f, const LaurentPoly& g) {
  if (f.dim() != 1 || g.dim() != 1) throw std::invalid_argument("product_graphs: one variable only");
  const LaurentPoly h = f * g;
  const Dfa r = recurrence_dfa(h);
  const long long gamma = r.alphabet;
  const long long bound = cofactor_bound(g, gamma - 1);
  const auto [glo, ghi] = g.bounding_box();
  const int a = glo[0], b = ghi[0], s = b - a;
  // (g*u)_{n+a} = sum_k g_k u_{n+a-k}; window index of u_{n+a-k} is b-k
  std::vector<long long> gc(static_cast<std::size_t>(s + 1), 0);
  for (const auto& [e, c] : g.terms()) gc[static_cast<std::size_t>(b - e[0])] = static_cast<long long>(c);

  using Key = std::pair<std::vector<long long>, std::size_t>;
  std::map<Key, std::size_t> ids;
  std::vector<Key> keys;
  std::vector<std::tuple<std::size_t, std::size_t, int, int>> edges;
  auto intern = [&](Key k) {
    auto [it, fresh] = ids.emplace(k, keys.size());
    if (fresh) keys.push_back(std::move(k));
    return it->second;
  };
  std::vector<long long> hist(static_cast<std::size_t>(s), -bound);
  while (true) {
    intern({hist, r.start});
    std::size_t k = hist.size();
    while (k > 0 && hist[k - 1] == bound) hist[--k] = -bound;
    if (k == 0) break;
    ++hist[k - 1];
  }
  for (std::size_t q = 0; q < keys.size(); ++q) {
    if (keys.size() > 5000000) throw GuardError("product_graphs: state space exceeds guard");
    const Key cur = keys[q];
    std::vector<long long> win = cur.first;
    win.push_back(0);
    for (long long u = -bound; u <= bound; ++u) {
      win.back() = u;
      long long y = 0;
      for (std::size_t j = 0; j < win.size(); ++j) y += gc[j] * win[j];
      if (y < 0 || y >= gamma) continue;
      const int t = r.next[cur.second][static_cast<std::size_t>(y)];
      if (t < 0) continue;
      const std::size_t to = intern({std::vector<long long>(win.begin() + 1, win.end()), static_cast<std::size_t>(t)});
      edges.emplace_back(q, to, static_cast<int>(u), static_cast<int>(y));
    }
  }
  auto name = [&](const Key& k) {
    std::string n = "u=";
    for (std::size_t j = 0; j < k.first.size(); ++j) n += (j ? "," : "") + std::to_string(k.first[j]);
    return n + ";q=" + std::to_string(k.second);
  };
  LabeledGraph v, w;
  for (const auto& k : keys) {
    v.add_vertex(name(k));
    w.add_vertex(name(k));
  }
  for (const auto& [from, to, u, y] : edges) {
    v.add_edge(from, to, u);
    w.add_edge(from, to, y);
  }
  return {v.trimmed(), w.trimmed(), bound};
}

enum class PatternKind { R, V, W };

inline const char* to_string(PatternKind k) {
  switch (k) {
    case PatternKind::R: return "R";
    case PatternKind::V: return "V";
    case PatternKind::W: return "W";
  }
  return "?";
}

struct PatternModel {
  PatternKind kind = PatternKind::R;
  LaurentPoly h{1}, f{1}, g{1};
  long long alphabet = 0;

  int dim() const { return h.dim(); }
};

inline PatternModel recurrence_model(const LaurentPoly& h) {
  const auto c = classify(h);
  if (!c.sandpile) throw std::invalid_argument("recurrence_model: " + to_string(h) + " is not a sandpile polynomial");
  PatternModel m;
  m.kind = PatternKind::R;
  m.h = h;
  m.alphabet = static_cast<long long>(h.coeff(Exponent(static_cast<std::size_t>(h.dim()), 0)));
  return m;
}

inline PatternModel product_pattern_model(PatternKind kind, const LaurentPoly& f, const LaurentPoly& g) {
  if (kind == PatternKind::R) throw std::invalid_argument("product_pattern_model: use recurrence_model for R");
  PatternModel m = recurrence_model(f * g);
  m.kind = kind;
  m.f = f;
  m.g = g;
  m.alphabet = std::max(m.alphabet, gamma_prime(f, g));
  return m;
}

/// Finite certificate of admissibility on the pattern's own domain: burning
/// for R; for W the pattern must be a Delta^g image and pass burning for the
/// product matrix; for V, Delta^g p must. Subpatterns of admissible patterns
/// are admissible, and the test is translation invariant.
inline bool pattern_admissible(const Config& p, const PatternModel& m) {
  if (p.window->dim() != m.dim()) throw std::invalid_argument("pattern_admissible: dimension mismatch");
  for (long long x : p.heights)
    if (x < 0 || x >= m.alphabet) throw std::invalid_argument("pattern_admissible: symbol " + std::to_string(x) + " outside the alphabet");
  if (m.kind == PatternKind::R) {
    const auto d = toppling_matrix(m.h, p.window);
    return d.is_stable(p.heights) && is_recurrent_burning(p, d);
  }
  const ProductModel pm = build_product_model(m.f, m.g, p.window);
  require_valid(pm, "pattern_admissible");
  if (m.kind == PatternKind::W) return w_membership(p, pm).member;
  const TopplingMatrix prime = pm.prime();
  const Config y{p.window, pm.apply_g(p.heights)};
  return prime.is_stable(y.heights) && std::all_of(y.heights.begin(), y.heights.end(), [](long long v) { return v >= 0; }) &&
         is_recurrent_burning(y, prime);
}

/// Local neighbour rules for cofactor values u of the worked example
/// f = 2 - u^-1, g = 2 - u, applied wherever the neighbours they mention
/// are present.
inline bool local_conditions_check(const std::vector<long long>& u, const LaurentPoly& f, const LaurentPoly& g) {
  if (!(f == parse_poly("-u^-1+2") && g == parse_poly("2-u")))
    throw std::invalid_argument("local_conditions_check: only f = -u^-1+2, g = 2-u are supported");
  const std::size_t n = u.size();
  auto in = [](long long x, std::initializer_list<long long> s) { return std::find(s.begin(), s.end(), x) != s.end(); };
  for (std::size_t k = 0; k < n; ++k) {
    const long long x = u[k];
    if (x < 1 || x > 4) return false;
    const bool left = k > 0, right = k + 1 < n;
    const long long prev = left ? u[k - 1] : 0, next = right ? u[k + 1] : 0;
    const long long gu = 2 * x - prev;
    switch (x) {
      case 1:
        for (std::size_t j = 0; j < k; ++j)
          if (u[j] != 2) return false;
        if (right && next != 2) return false;
        if (left && !in(gu, {0, 1})) return false;
        break;
      case 2:
        if (left && (!in(prev, {1, 2, 3, 4}) || !in(gu, {0, 1, 2, 3}))) return false;
        if (right && !in(next, {1, 2, 3})) return false;
        break;
      case 3:
        if (left && (!in(prev, {2, 3, 4}) || !in(gu, {2, 3, 4}))) return false;
        if (right && !in(next, {2, 3})) return false;
        break;
      case 4:
        if (left && (prev != 4 || gu != 4)) return false;
        if (right && !in(next, {2, 3, 4})) return false;
        break;
    }
  }
  return true;
}

enum class Boundary { Free, Collar };

inline const char* to_string(Boundary b) { return b == Boundary::Free ? "free" : "collar"; }

struct CountRow {
  int n = 0;
  std::size_t sites = 0;
  BigInt count = 0;
  double estimate = 0.0;
};

namespace detail {

/// Patterns on the cube of radius n passing burning for h, by depth-first
/// extension in lexicographic site order with pruning on every prefix.
inline BigInt count_recurrent_patterns(const LaurentPoly& h, int n, Boundary boundary, std::uint64_t guard) {
  const int d = h.dim();
  const Window cube = Window::cube(d, n);
  const long long gamma = static_cast<long long>(h.coeff(Exponent(static_cast<std::size_t>(d), 0)));
  const std::size_t len = cube.size();
  std::vector<TopplingMatrix> prefix;
  for (std::size_t k = 1; k <= len; ++k)
    prefix.push_back(toppling_matrix(h, Window(d, std::vector<Site>(cube.sites().begin(), cube.sites().begin() + static_cast<long>(k)))));
  std::optional<TopplingMatrix> outer;
  std::vector<std::size_t> pos;
  if (boundary == Boundary::Collar) {
    const Window big = Window::cube(d, n + support_radius(h));
    outer.emplace(toppling_matrix(h, big));
    for (const auto& s : cube.sites()) pos.push_back(*big.index(s));
  }
  BigInt total = 0;
  std::uint64_t nodes = 0;
  Heights cur;
  std::function<void()> rec = [&] {
    if (++nodes > guard) throw GuardError("entropy_by_counting: enumeration exceeds guard");
    if (cur.size() == len) {
      if (outer) {
        Config c = outer->v_max();
        for (std::size_t k = 0; k < len; ++k) c.heights[pos[k]] = cur[k];
        if (!is_recurrent_burning(c, *outer)) return;
      }
      ++total;
      return;
    }
    for (long long x = 0; x < gamma; ++x) {
      cur.push_back(x);
      const auto& m = prefix[cur.size() - 1];
      if (is_recurrent_burning({m.window(), cur}, m)) rec();
      cur.pop_back();
    }
  };
  rec();
  return total;
}

inline double log_count(const BigInt& c) {
  if (c == 0) return -std::numeric_limits<double>::infinity();
  return std::log(static_cast<double>(c));
}

}  // namespace detail

/// (1/|Q_N|) log of the number of admissible patterns on Q_N = {-N..N}^d.
/// In one variable patterns are words of the infinite-volume language
/// (automaton count); for d = 2 only R is supported, by enumeration. The
/// collar boundary pads with maximal symbols on both sides.
inline std::vector<CountRow> entropy_by_counting(const PatternModel& m, int n_max, Boundary boundary, std::uint64_t guard = 100000000) {
  std::vector<CountRow> rows;
  if (m.dim() == 1) {
    LabeledGraph g;
    int pad = 0;
    if (m.kind == PatternKind::R) {
      g = recurrence_graph(m.h);
      pad = detail::support_radius_1d(m.h);
    } else {
      const auto pg = product_graphs(m.f, m.g);
      g = m.kind == PatternKind::V ? pg.v : pg.w;
      pad = detail::support_radius_1d(m.h) + detail::support_radius_1d(m.g);
    }
    Word collar;
    if (boundary == Boundary::Collar) {
      const auto labels = g.labels();
      if (labels.empty()) throw std::invalid_argument("entropy_by_counting: empty language");
      collar.assign(static_cast<std::size_t>(pad), *labels.rbegin());
    }
    for (int n = 0; n <= n_max; ++n) {
      CountRow row;
      row.n = n;
      row.sites = static_cast<std::size_t>(2 * n + 1);
      row.count = g.count_words(row.sites, collar, collar);
      row.estimate = detail::log_count(row.count) / static_cast<double>(row.sites);
      rows.push_back(row);
    }
    return rows;
  }
  if (m.dim() != 2 || m.kind != PatternKind::R) throw std::invalid_argument("entropy_by_counting: only R patterns are counted in two dimensions");
  for (int n = 0; n <= n_max; ++n) {
    CountRow row;
    row.n = n;
    row.sites = static_cast<std::size_t>((2 * n + 1) * (2 * n + 1));
    row.count = detail::count_recurrent_patterns(m.h, n, boundary, guard);
    row.estimate = detail::log_count(row.count) / static_cast<double>(row.sites);
    rows.push_back(row);
  }
  return rows;
}

inline std::string format_double(double x, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline std::string to_csv(const std::vector<CountRow>& rows) {
  std::string s = "N,sites,count,estimate\n";
  for (const auto& r : rows) s += std::to_string(r.n) + "," + std::to_string(r.sites) + "," + r.count.str() + "," + format_double(r.estimate) + "\n";
  return s;
}

/// Words of length n passing burning for a one-variable h, by pruned
/// depth-first search over prefixes.
inline std::set<Word> recurrent_words(const LaurentPoly& h, std::size_t n) {
  const long long gamma = static_cast<long long>(h.coeff({0}));
  std::vector<TopplingMatrix> prefix;
  for (std::size_t k = 1; k <= n; ++k) prefix.push_back(toppling_matrix(h, Window::interval(1, static_cast<int>(k))));
  std::set<Word> out;
  Heights cur;
  std::function<void()> rec = [&] {
    if (cur.size() == n) {
      out.insert(Word(cur.begin(), cur.end()));
      return;
    }
    for (long long x = 0; x < gamma; ++x) {
      cur.push_back(x);
      const auto& m = prefix[cur.size() - 1];
      if (is_recurrent_burning({m.window(), cur}, m)) rec();
      cur.pop_back();
    }
  };
  rec();
  return out;
}

/// Restrictions to {1..n} of the bounded u (for V) or of g*u (for W) such
/// that g*u, on the longest window where it is determined by u on
/// {1-margin-s .. n+margin}, passes burning for h = f g.
inline std::set<Word> product_words(const LaurentPoly& f, const LaurentPoly& g, PatternKind kind, std::size_t n, int margin) {
  if (kind == PatternKind::R) throw std::invalid_argument("product_words: V or W only");
  const LaurentPoly h = f * g;
  const long long gamma = static_cast<long long>(h.coeff({0}));
  const long long bound = cofactor_bound(g, gamma - 1);
  const auto [glo, ghi] = g.bounding_box();
  const int a = glo[0], b = ghi[0], s = b - a;
  const std::size_t total_y = n + 2 * static_cast<std::size_t>(margin);
  const std::size_t total_u = total_y + static_cast<std::size_t>(s);
  std::vector<TopplingMatrix> prefix;
  for (std::size_t k = 1; k <= total_y; ++k) prefix.push_back(toppling_matrix(h, Window::interval(1, static_cast<int>(k))));
  std::set<Word> out;
  std::vector<long long> u, y;
  std::function<void()> rec = [&] {
    if (u.size() == total_u) {
      Word w;
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t iy = static_cast<std::size_t>(margin) + k;
        w.push_back(static_cast<int>(kind == PatternKind::W ? y[iy] : u[iy + static_cast<std::size_t>(b)]));
      }
      out.insert(std::move(w));
      return;
    }
    for (long long x = -bound; x <= bound; ++x) {
      u.push_back(x);
      bool ok = true;
      bool pushed = false;
      if (u.size() > static_cast<std::size_t>(s)) {
        long long v = 0;
        for (const auto& [e, c] : g.terms()) v += static_cast<long long>(c) * u[u.size() - 1 - static_cast<std::size_t>(e[0] - a)];
        if (v < 0 || v >= gamma) {
          ok = false;
        } else {
          y.push_back(v);
          pushed = true;
          const auto& m = prefix[y.size() - 1];
          ok = is_recurrent_burning({m.window(), Heights(y.begin(), y.end())}, m);
        }
      }
      if (ok) rec();
      if (pushed) y.pop_back();
      u.pop_back();
    }
  };
  rec();
  return out;
}

namespace detail {

/// Remainder of sum_k w_k u^k modulo the polynomial f (shifted to start at
/// u^0) over the rationals.
inline std::vector<Rational> residue_mod(const Word& w, const LaurentPoly& f) {
  const auto [flo, fhi] = f.bounding_box();
  std::vector<Rational> fc(static_cast<std::size_t>(fhi[0] - flo[0] + 1), 0);
  for (const auto& [e, c] : f.terms()) fc[static_cast<std::size_t>(e[0] - flo[0])] = Rational(c);
  const std::size_t m = fc.size() - 1;
  std::vector<Rational> r(w.begin(), w.end());
  if (r.size() < m) r.resize(m, 0);
  for (std::size_t k = r.size(); k-- > m;) {
    const Rational q = r[k] / fc[m];
    for (std::size_t j = 0; j <= m; ++j) r[k - m + j] -= q * fc[j];
  }
  r.resize(m);
  return r;
}

}  // namespace detail

/// Distinctness check: W words on Q_{j+N} that agree off Q_j
/// never differ on Q_j by a multiple of f.
struct DistinctnessReport {
  std::size_t patterns = 0;
  std::size_t groups = 0;
  std::size_t pairs = 0;
  std::size_t violations = 0;
  std::optional<std::pair<Word, Word>> witness;
};

inline DistinctnessReport collar_distinctness(const LaurentPoly& f, const LaurentPoly& g, int core, int collar) {
  const auto pg = product_graphs(f, g);
  const std::size_t len = static_cast<std::size_t>(2 * (core + collar) + 1);
  const auto words = pg.w.words(len);
  DistinctnessReport rep;
  rep.patterns = words.size();
  std::map<Word, std::vector<Word>> by_collar;
  const std::size_t lo = static_cast<std::size_t>(collar), hi = lo + static_cast<std::size_t>(2 * core + 1);
  for (const auto& w : words) {
    Word key;
    for (std::size_t k = 0; k < len; ++k)
      if (k < lo || k >= hi) key.push_back(w[k]);
    by_collar[key].push_back(Word(w.begin() + static_cast<long>(lo), w.begin() + static_cast<long>(hi)));
  }
  rep.groups = by_collar.size();
  // cores differ by a multiple of f over Q iff their remainders agree;
  // only such pairs need the integral division
  for (const auto& [key, cores] : by_collar) {
    rep.pairs += cores.size() * (cores.size() - 1) / 2;
    std::map<std::vector<Rational>, std::vector<std::size_t>> classes;
    for (std::size_t a = 0; a < cores.size(); ++a) classes[detail::residue_mod(cores[a], f)].push_back(a);
    for (const auto& [r, members] : classes)
      for (std::size_t x = 0; x < members.size(); ++x)
        for (std::size_t y = x + 1; y < members.size(); ++y) {
          const Word& a = cores[members[x]];
          const Word& b = cores[members[y]];
          LaurentPoly diff(1);
          for (std::size_t k = 0; k < a.size(); ++k) diff.add_term({static_cast<int>(k) - core}, a[k] - b[k]);
          if (divide_univariate(diff, f)) {
            ++rep.violations;
            if (!rep.witness) rep.witness = {a, b};
          }
        }
  }
  return rep;
}

}  // namespace sandpile

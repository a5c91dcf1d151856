#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "figures.hpp"
#include "group.hpp"
#include "harmonic.hpp"
#include "io.hpp"
#include "product.hpp"
#include "subshift.hpp"

namespace sandpile {

struct CheckResult {
  std::string name;
  bool pass = false;
  Json detail;
};

struct Report {
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;  // relative to the output directory

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  Json summary() const {
    Json s = Json::array();
    for (const auto& c : checks) s.push_back({{"check", c.name}, {"pass", c.pass}});
    return {{"all_pass", all_pass()}, {"checks", s}, {"artifacts", artifacts}};
  }
};

/// A factorisation h = f g from the worked examples.
struct WorkedProduct {
  std::string name;
  LaurentPoly f, g, h;
};

inline std::vector<WorkedProduct> worked_products() {
  return {
      {"h1", parse_poly("-u^-2-2u^-1+3+u"), parse_poly("2-u"), parse_poly("-2u^-2-3u^-1+8-u-u^2")},
      {"h2", parse_poly("-u^-1+3+u"), parse_poly("u^-1+3-u"), parse_poly("-u^-2+11-u^2")},
      {"h3", parse_poly("-u^-2-2u^-1+2-u+u^2"), parse_poly("1-u-u^2"), parse_poly("-u^-2-u^-1+5-u-u^4")},
  };
}

/// f = 1 - u, g = 1 - u^-1 on {1..n}.
inline ProductModel btw_model(int n) { return build_product_model(parse_poly("1-u"), parse_poly("-u^-1+1"), Window::interval(1, n)); }

namespace detail {

class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path root, Report& rep) : root_(std::move(root)), rep_(rep) {}

  void operator()(const std::string& name, const std::string& text) {
    write_file(root_ / name, text);
    rep_.artifacts.push_back(name);
  }

 private:
  std::filesystem::path root_;
  Report& rep_;
};

inline Json classification_json(const LaurentPoly& h) {
  const auto c = classify(h);
  Json j = {{"lopsided", c.lopsided}, {"sandpile", c.sandpile}, {"simple", c.simple}, {"l1_norm", bigint_json(c.l1_norm)}};
  j["gamma"] = c.lopsided ? bigint_json(c.dominant_coeff) : Json(nullptr);
  return j;
}

inline Json real_json(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json word_json(const std::optional<Word>& w) { return w ? Json(*w) : Json(nullptr); }

inline CheckResult products_check() {
  CheckResult c{"worked-products", true, Json::array()};
  for (const auto& p : worked_products()) {
    const LaurentPoly prod = mul(p.f, p.g);
    const bool sandpile = classify(p.h).sandpile;
    // Delta' = Delta^g Delta^f on a small window, reported but not required
    const auto m = build_product_model(p.f, p.g, Window::interval(1, 6));
    c.detail.push_back({{"name", p.name},
                        {"f", to_string(p.f)},
                        {"g", to_string(p.g)},
                        {"product", to_string(prod)},
                        {"expected", to_string(p.h)},
                        {"equal", prod == p.h},
                        {"classification", classification_json(p.h)},
                        {"product_matrix_valid_n6", m.valid()}});
    c.pass = c.pass && prod == p.h && sandpile;
  }
  return c;
}

inline CheckResult btw_check(std::uint64_t seed) {
  const int n = 3;
  const auto m = btw_model(n);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> site(0, n - 1);
  Config v{m.window, Heights(n, 0)};
  for (int k = 0; k < 40 * n * n; ++k) {
    ++v.heights[static_cast<std::size_t>(site(rng))];
    v = btw_stabilize(v, m).stable;
  }
  const Heights slope = m.apply_g(v.heights);
  const auto group = enumerate_recurrent(m.prime());
  Json elements = Json::array();
  for (const auto& x : group.elements()) elements.push_back(x);
  const bool pass = v.heights == Heights{2, 1, 0} && slope == Heights{1, 1, 0} && group.order() == 1 &&
                    group.elements()[0] == Heights{1, 1, 0};
  return {"btw-fixed-point",
          pass,
          {{"n", n},
           {"limit", v.heights},
           {"delta_g_limit", slope},
           {"recurrent_class", elements},
           {"identity", group.identity().heights},
           {"delta_prime", m.delta_prime}}};
}

inline Json figure_json(const FigureCheck& c) {
  Json counts = Json::array();
  for (std::size_t k = 0; k < c.counts.size(); ++k)
    counts.push_back({{"length", k + 1}, {"graph", c.counts[k].first}, {"direct", c.counts[k].second}});
  Json j = {{"name", c.name}, {"description", c.description}, {"entropy", real_json(c.entropy)}, {"equal", c.equal}};
  j["first_mismatch"] = c.first_mismatch ? Json(*c.first_mismatch) : Json(nullptr);
  j["graph_only"] = word_json(c.graph_only);
  j["direct_only"] = word_json(c.direct_only);
  j["counts"] = counts;
  return j;
}

struct EntropyRow {
  std::string quantity;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool relative = false;

  bool pass() const {
    const double err = std::abs(value - target);
    return relative ? err <= tolerance * std::abs(target) : err <= tolerance;
  }
};

inline std::string entropy_csv(const std::vector<EntropyRow>& rows) {
  auto short_real = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return std::string(buf);
  };
  std::string s = "quantity,value,target,tolerance,kind,pass\n";
  for (const auto& r : rows)
    s += r.quantity + "," + format_double(r.value) + "," + format_double(r.target) + "," + short_real(r.tolerance) + "," +
         (r.relative ? "relative" : "absolute") + "," + (r.pass() ? "true" : "false") + "\n";
  return s;
}

}  // namespace detail

/// Mahler measures, graph entropies and counting estimates for h = f g in
/// one variable. The W and V presentations should carry the entropy m(f),
/// the recurrent class m(h).
inline Report cover_check(const LaurentPoly& f, const LaurentPoly& g, int n_max, double tolerance = 1e-6, double count_tolerance = 0.1) {
  if (f.dim() != 1 || g.dim() != 1) throw std::invalid_argument("cover-check: one-variable f and g required");
  if (n_max < 0) throw std::invalid_argument("cover-check: nmax must be nonnegative");
  const LaurentPoly h = f * g;
  if (!classify(h).sandpile) throw std::invalid_argument("cover-check: f*g = " + to_string(h) + " is not a sandpile polynomial");
  Report rep;
  const double mf = mahler(f).value, mh = mahler(h).value, mg = mahler(g).value;
  const auto pg = product_graphs(f, g);
  const double er = graph_entropy(recurrence_graph(h)), ev = graph_entropy(pg.v), ew = graph_entropy(pg.w);
  rep.checks.push_back({"mahler", std::abs(mh - mf - mg) < tolerance,
                        {{"f", detail::real_json(mf)}, {"g", detail::real_json(mg)}, {"h", detail::real_json(mh)}}});
  rep.checks.push_back({"graph-entropy-R", std::abs(er - mh) < tolerance, {{"entropy", er}, {"target", mh}}});
  rep.checks.push_back({"graph-entropy-V", std::abs(ev - mf) < tolerance, {{"entropy", ev}, {"target", mf}}});
  rep.checks.push_back({"graph-entropy-W", std::abs(ew - mf) < tolerance, {{"entropy", ew}, {"target", mf}}});
  for (auto kind : {PatternKind::R, PatternKind::V, PatternKind::W}) {
    const auto model = kind == PatternKind::R ? recurrence_model(h) : product_pattern_model(kind, f, g);
    const auto rows = entropy_by_counting(model, n_max, Boundary::Free);
    const double target = kind == PatternKind::R ? mh : mf;
    const double est = rows.back().estimate;
    Json table = Json::array();
    for (const auto& r : rows) table.push_back({{"n", r.n}, {"sites", r.sites}, {"count", r.count.str()}, {"estimate", r.estimate}});
    rep.checks.push_back({std::string("counting-") + to_string(kind), std::abs(est - target) <= count_tolerance * target,
                          {{"n", n_max}, {"estimate", est}, {"target", target}, {"relative_tolerance", count_tolerance}, {"rows", table}}});
  }
  return rep;
}

struct ReproduceOptions {
  int figure_length = 10;
  int figure_margin = 4;
  int count_r = 12;
  int count_v = 8;
  int count_w = 14;
  std::uint64_t seed = 1;
};

/// Runs the worked-example suite and writes its artifacts under out_dir.
/// Outputs depend only on the options.
inline Report reproduce_worked_examples(const std::filesystem::path& out_dir, const ReproduceOptions& opt = {}) {
  Report rep;
  detail::ArtifactWriter put(out_dir, rep);

  rep.checks.push_back(detail::products_check());
  put("products.json", dump(rep.checks.back().detail));

  rep.checks.push_back(detail::btw_check(opt.seed));
  put("btw_n3.json", dump(rep.checks.back().detail));

  const auto figs = verify_figure_graphs(opt.figure_length, opt.figure_margin);
  Json fj = Json::array();
  for (const auto& c : figs.checks) {
    fj.push_back(detail::figure_json(c));
    put(c.name + ".dot", c.graph.to_dot(c.name));
    rep.checks.push_back({"figure-" + c.name.substr(6), c.equal, fj.back()});
  }
  put("figures.json", dump({{"max_length", figs.n_max}, {"margin", figs.margin}, {"checks", fj}}));

  const LaurentPoly f = figures::f(), g = figures::g(), h = f * g;
  const auto pg = product_graphs(f, g);
  const auto rg = recurrence_graph(h);
  put("derived_R.dot", rg.to_dot("R"));
  put("derived_V.dot", pg.v.to_dot("V"));
  put("derived_W.dot", pg.w.to_dot("W"));

  const double log2 = std::log(2.0), log4 = std::log(4.0);
  std::vector<detail::EntropyRow> table = {
      {"mahler(h)", mahler(h).value, log4, 1e-6, false},
      {"mahler(f)", mahler(f).value, log2, 1e-6, false},
      {"mahler(g)", mahler(g).value, log2, 1e-6, false},
  };
  for (const auto& c : figs.checks)
    if (std::isfinite(c.entropy)) table.push_back({"graph(" + c.name + ")", c.entropy, c.name == "figure1" ? log4 : log2, 1e-9, false});
  table.push_back({"graph(derived R)", graph_entropy(rg), log4, 1e-9, false});
  table.push_back({"graph(derived V)", graph_entropy(pg.v), log2, 1e-9, false});
  table.push_back({"graph(derived W)", graph_entropy(pg.w), log2, 1e-9, false});
  const std::vector<std::tuple<PatternKind, int, double, double>> counts = {
      {PatternKind::R, opt.count_r, log4, 0.05}, {PatternKind::V, opt.count_v, log2, 0.10}, {PatternKind::W, opt.count_w, log2, 0.10}};
  for (const auto& [kind, n, target, tol] : counts) {
    const auto model = kind == PatternKind::R ? recurrence_model(h) : product_pattern_model(kind, f, g);
    const auto rows = entropy_by_counting(model, n, Boundary::Free);
    const std::string k = to_string(kind);
    put("counting_" + k + ".csv", to_csv(rows));
    table.push_back({"counting(" + k + ",N=" + std::to_string(n) + ")", rows.back().estimate, target, tol, true});
  }
  put("entropy_table.csv", detail::entropy_csv(table));
  bool entropy_ok = true;
  Json tj = Json::array();
  for (const auto& r : table) {
    entropy_ok = entropy_ok && r.pass();
    tj.push_back({{"quantity", r.quantity}, {"value", r.value}, {"target", r.target}, {"pass", r.pass()}});
  }
  rep.checks.push_back({"entropy-table", entropy_ok, tj});

  put("summary.json", dump(rep.summary()));
  return rep;
}

}  // namespace sandpile

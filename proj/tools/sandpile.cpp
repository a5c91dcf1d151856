// sandpile: command-line front end for the header-only library.

#include <cstdint>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>

#include <sandpile/report.hpp>

using namespace sandpile;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitGuard = 3;

struct ExperimentSpec {
  std::string command;
  std::string poly, f, g;
  std::string window;
  std::string config;
  std::string xi;
  std::string out_dir;
  std::string emit_dot;
  std::optional<double> tolerance;
  std::uint64_t seed = 1;
  int nmax = 12;
  std::string kind = "R";
  std::string boundary = "free";
  std::size_t samples = 0;
  bool elements = false;
  bool enumerate_w = false;
  bool check_projection = false;
  bool kernel = false;
  bool mahler = false;
};

const std::set<std::string> kCommands = {"classify", "stabilize", "group", "product", "harmonic", "subshift", "cover-check", "reproduce"};

ExperimentSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("spec: expected a JSON object");
  static const std::set<std::string> known = {"command", "polynomials", "window", "config", "xi", "out_dir", "emit_dot", "tolerance", "seed", "nmax",
                                              "kind", "boundary", "samples", "elements", "enumerate_w", "check_projection", "kernel", "mahler"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw std::invalid_argument("spec: unknown field '" + k + "'");
  ExperimentSpec s;
  auto field = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(out);
    } catch (const nlohmann::json::exception&) {
      throw std::invalid_argument(std::string("spec: field '") + key + "' has the wrong type");
    }
  };
  if (!j.contains("command")) throw std::invalid_argument("spec: missing 'command'");
  field("command", s.command);
  if (!kCommands.count(s.command)) throw std::invalid_argument("spec: unknown command '" + s.command + "'");
  if (j.contains("polynomials")) {
    const auto& p = j.at("polynomials");
    if (!p.is_object()) throw std::invalid_argument("spec: 'polynomials' must be an object");
    for (const auto& [k, v] : p.items()) {
      std::string text = v.is_string() ? v.get<std::string>() : to_string(poly_from_json(v));
      if (k == "poly" || k == "h") s.poly = text;
      else if (k == "f") s.f = text;
      else if (k == "g") s.g = text;
      else throw std::invalid_argument("spec: unknown polynomial '" + k + "'");
    }
  }
  if (j.contains("window")) s.window = j.at("window").is_string() ? j.at("window").get<std::string>() : j.at("window").dump();
  field("config", s.config);
  field("xi", s.xi);
  field("out_dir", s.out_dir);
  field("emit_dot", s.emit_dot);
  if (j.contains("tolerance")) {
    double t = 0;
    field("tolerance", t);
    s.tolerance = t;
  }
  field("seed", s.seed);
  field("nmax", s.nmax);
  field("kind", s.kind);
  field("boundary", s.boundary);
  field("samples", s.samples);
  field("elements", s.elements);
  field("enumerate_w", s.enumerate_w);
  field("check_projection", s.check_projection);
  field("kernel", s.kernel);
  field("mahler", s.mahler);
  return s;
}

LaurentPoly need_poly(const std::string& text, const char* name) {
  if (text.empty()) throw std::invalid_argument(std::string("missing polynomial --") + name);
  return parse_poly(text);
}

Window need_window(const ExperimentSpec& s) {
  if (s.window.empty()) throw std::invalid_argument("missing --window");
  return parse_window_arg(s.window);
}

void emit(const ExperimentSpec& s, const std::string& file, const std::string& text) {
  std::cout << text;
  if (!s.out_dir.empty()) write_file(std::filesystem::path(s.out_dir) / file, text);
}

Json report_json(const Report& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back({{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return {{"all_pass", r.all_pass()}, {"checks", checks}};
}

int cmd_classify(const ExperimentSpec& s) {
  const auto h = need_poly(s.poly, "poly");
  Json out = {{"poly", to_string(h)}, {"terms", to_json(h)}};
  out.update(detail::classification_json(h));
  emit(s, "classify.json", dump(out));
  return kExitOk;
}

Config read_config(const std::string& path, const WindowPtr& window) {
  const Json j = parse_json(read_file(path), "config file");
  if (j.is_array()) {
    Config v{window, j.get<Heights>()};
    if (v.heights.size() != window->size()) throw std::invalid_argument("config: heights do not match window");
    return v;
  }
  if (j.contains("window")) {
    Config v = config_from_json(j);
    if (*v.window != *window) throw std::invalid_argument("config: window differs from --window");
    return {window, v.heights};
  }
  Config v{window, j.at("heights").get<Heights>()};
  if (v.heights.size() != window->size()) throw std::invalid_argument("config: heights do not match window");
  return v;
}

int cmd_stabilize(const ExperimentSpec& s) {
  const auto h = need_poly(s.poly, "poly");
  const auto w = make_window(need_window(s));
  if (s.config.empty()) throw std::invalid_argument("missing --config");
  const auto delta = toppling_matrix(h, w);
  const auto r = stabilize(read_config(s.config, w), delta);
  emit(s, "stabilize.json", dump({{"stable", to_json(r.stable)}, {"odometer", r.odometer}}));
  return kExitOk;
}

int cmd_group(const ExperimentSpec& s) {
  const auto h = need_poly(s.poly, "poly");
  const auto delta = toppling_matrix(h, need_window(s));
  const auto group = enumerate_recurrent(delta);
  std::string lines = Json{{"order", group.order()}, {"determinant", determinant(delta.matrix()).str()}, {"identity", group.identity().heights}}.dump() + "\n";
  if (s.elements)
    for (const auto& x : group.elements()) lines += Json{{"element", x}}.dump() + "\n";
  std::mt19937_64 rng(s.seed);
  for (std::size_t k = 0; k < s.samples; ++k) lines += Json{{"sample", group.haar_uniform(rng).heights}}.dump() + "\n";
  emit(s, "group.jsonl", lines);
  return kExitOk;
}

int cmd_product(const ExperimentSpec& s) {
  const auto m = build_product_model(need_poly(s.f, "f"), need_poly(s.g, "g"), need_window(s));
  Json out = {{"f", to_string(m.f)}, {"g", to_string(m.g)}, {"h", to_string(m.h)}, {"window", to_json(*m.window)}};
  out["validity"] = {{"p1", m.validity.p1},
                     {"p2", m.validity.p2},
                     {"weakly_dominant", m.validity.weakly_dominant},
                     {"m_matrix", m.validity.m_matrix},
                     {"asm_valid", m.valid()},
                     {"violations", m.validity.violations}};
  out["delta_prime"] = m.delta_prime;
  out["gamma_prime"] = m.gamma_prime;
  out["beta"] = m.beta;
  out["det_delta_prime"] = determinant(m.delta_prime).str();
  out["det_delta_g"] = determinant(m.delta_g).str();
  if (s.enumerate_w) {
    const auto rg = enumerate_recurrent(m.prime());
    const auto wg = enumerate_W(m);
    Json elements = Json::array();
    for (std::size_t k = 0; k < wg.size(); ++k) elements.push_back({{"w", wg.elements_w[k]}, {"v", wg.elements_v[k]}});
    out["cardinalities"] = {{"recurrent", rg.order()}, {"W", wg.size()}};
    out["W"] = {{"strategy", to_string(wg.strategy)}, {"elements", elements}};
  }
  if (s.check_projection) {
    const auto p = projection_check(m);
    out["projection"] = {{"equal", p.equal},         {"vacuous", p.vacuous}, {"interior_size", p.interior_size},
                         {"projected", p.projected}, {"direct", p.direct},   {"witness", p.witness ? Json(*p.witness) : Json(nullptr)},
                         {"warning", p.warning}};
  }
  emit(s, "product.json", dump(out));
  return kExitOk;
}

int cmd_harmonic(const ExperimentSpec& s) {
  const auto h = need_poly(s.poly, "poly");
  const int modes = int(s.kernel) + int(s.mahler) + int(!s.xi.empty());
  if (modes != 1) throw std::invalid_argument("harmonic: choose exactly one of --kernel, --mahler, --xi");
  if (s.mahler) {
    const auto r = mahler(h);
    emit(s, "mahler.json", dump({{"poly", to_string(h)}, {"value", r.value}, {"error_estimate", r.error_estimate}, {"method", r.method}, {"warning", r.warning}}));
    return kExitOk;
  }
  const double tol = s.tolerance.value_or(1e-9);
  const auto k = homoclinic(h, tol);
  if (s.kernel) {
    const std::string csv = kernel_csv(k);
    if (s.out_dir.empty()) {
      std::cout << csv;
    } else {
      write_file(std::filesystem::path(s.out_dir) / "kernel.csv", csv);
      emit(s, "kernel.json",
           dump({{"poly", to_string(h)}, {"radius", k.radius}, {"method", k.method}, {"residual", k.residual}, {"boundary_max", k.boundary_max}, {"csv", "kernel.csv"}}));
    }
    return kExitOk;
  }
  const Config v = config_from_json(parse_json(read_file(s.xi), "xi input"));
  const IntegerField field{v.window, v.heights};
  const WindowPtr eval = s.window.empty() ? v.window : make_window(parse_window_arg(s.window));
  const auto x = xi(field, k, eval, std::max(tol, 1e-8));
  Json out = {{"poly", to_string(h)}, {"window", to_json(*eval)}, {"values", x.values}};
  try {
    out["defect_reflected"] = check_in_Xh(x, reflect(h));
  } catch (const std::invalid_argument&) {
    out["defect_reflected"] = nullptr;
  }
  emit(s, "xi.json", dump(out));
  return kExitOk;
}

PatternKind parse_kind(const std::string& k) {
  if (k == "R") return PatternKind::R;
  if (k == "V") return PatternKind::V;
  if (k == "W") return PatternKind::W;
  throw std::invalid_argument("kind must be R, V or W");
}

int cmd_subshift(const ExperimentSpec& s) {
  const PatternKind kind = parse_kind(s.kind);
  if (s.boundary != "free" && s.boundary != "collar") throw std::invalid_argument("boundary must be free or collar");
  const Boundary b = s.boundary == "free" ? Boundary::Free : Boundary::Collar;
  PatternModel model;
  if (kind == PatternKind::R) {
    const LaurentPoly h = !s.poly.empty() ? parse_poly(s.poly) : need_poly(s.f, "f") * need_poly(s.g, "g");
    model = recurrence_model(h);
  } else {
    model = product_pattern_model(kind, need_poly(s.f, "f"), need_poly(s.g, "g"));
  }
  if (!s.emit_dot.empty()) {
    if (model.dim() != 1) throw std::invalid_argument("--emit-dot needs a one-variable model");
    LabeledGraph g;
    if (kind == PatternKind::R) {
      g = recurrence_graph(model.h);
    } else {
      const auto pg = product_graphs(model.f, model.g);
      g = kind == PatternKind::V ? pg.v : pg.w;
    }
    write_file(s.emit_dot, g.to_dot(to_string(kind)));
  }
  const std::string csv = to_csv(entropy_by_counting(model, s.nmax, b));
  emit(s, std::string("counting_") + to_string(kind) + ".csv", csv);
  return kExitOk;
}

int cmd_cover_check(const ExperimentSpec& s) {
  const auto r = cover_check(need_poly(s.f, "f"), need_poly(s.g, "g"), s.nmax, s.tolerance.value_or(1e-6));
  emit(s, "cover_check.json", dump(report_json(r)));
  return kExitOk;
}

int cmd_reproduce(const ExperimentSpec& s) {
  ReproduceOptions opt;
  opt.seed = s.seed;
  const std::string dir = s.out_dir.empty() ? "reproduce_out" : s.out_dir;
  const auto r = reproduce_worked_examples(dir, opt);
  std::cout << dump(r.summary());
  return kExitOk;
}

int run(const ExperimentSpec& s) {
  if (s.command == "classify") return cmd_classify(s);
  if (s.command == "stabilize") return cmd_stabilize(s);
  if (s.command == "group") return cmd_group(s);
  if (s.command == "product") return cmd_product(s);
  if (s.command == "harmonic") return cmd_harmonic(s);
  if (s.command == "subshift") return cmd_subshift(s);
  if (s.command == "cover-check") return cmd_cover_check(s);
  if (s.command == "reproduce") return cmd_reproduce(s);
  throw std::invalid_argument("unknown command '" + s.command + "'");
}

int guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const GuardError& e) {
    std::cerr << "guard: " << e.what() << "\n";
    return kExitGuard;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dissipative abelian sandpiles: groups, product models, kernels, entropy"};
  app.require_subcommand(1);
  app.fallthrough();
  ExperimentSpec s;
  std::string spec_file;
  double tolerance = 0;
  app.add_option("--out-dir", s.out_dir, "Directory for JSON/CSV/DOT artifacts");
  auto* tol = app.add_option("--tolerance", tolerance, "Numerical tolerance");
  app.add_option("--seed", s.seed, "Random seed");

  auto poly_opt = [&](CLI::App* c) { c->add_option("--poly", s.poly, "Laurent polynomial, e.g. -2*u1^-1+5-2*u1")->required(); };
  auto fg_opts = [&](CLI::App* c, bool required) {
    auto* a = c->add_option("--f", s.f, "Toppling rule polynomial f");
    auto* b = c->add_option("--g", s.g, "Toppling condition polynomial g");
    if (required) {
      a->required();
      b->required();
    }
  };
  auto window_opt = [&](CLI::App* c, bool required) {
    auto* o = c->add_option("--window", s.window, "box:d=1:1..5, box:d=2:-2..2,-2..2, or a JSON site list");
    if (required) o->required();
  };

  auto* classify_cmd = app.add_subcommand("classify", "Lopsided / sandpile / simple classification");
  poly_opt(classify_cmd);

  auto* stabilize_cmd = app.add_subcommand("stabilize", "Stabilize a configuration");
  poly_opt(stabilize_cmd);
  window_opt(stabilize_cmd, true);
  stabilize_cmd->add_option("--config", s.config, "JSON file with heights")->required();

  auto* group_cmd = app.add_subcommand("group", "Recurrent group of a window");
  poly_opt(group_cmd);
  window_opt(group_cmd, true);
  group_cmd->add_flag("--elements", s.elements, "List all elements");
  group_cmd->add_option("--samples", s.samples, "Haar-uniform samples to draw");

  auto* product_cmd = app.add_subcommand("product", "Product model Delta' = Delta^g Delta^f");
  fg_opts(product_cmd, true);
  window_opt(product_cmd, true);
  product_cmd->add_flag("--enumerate-w", s.enumerate_w, "Enumerate W_F");
  product_cmd->add_flag("--check-projection", s.check_projection, "Compare projection with the interior recurrent class");

  auto* harmonic_cmd = app.add_subcommand("harmonic", "Homoclinic kernel, Mahler measure, xi map");
  poly_opt(harmonic_cmd);
  window_opt(harmonic_cmd, false);
  auto* k = harmonic_cmd->add_flag("--kernel", s.kernel, "Export the kernel as CSV");
  auto* m = harmonic_cmd->add_flag("--mahler", s.mahler, "Logarithmic Mahler measure");
  auto* x = harmonic_cmd->add_option("--xi", s.xi, "Config JSON file to map to the torus");
  k->excludes(m)->excludes(x);
  m->excludes(x);

  auto* subshift_cmd = app.add_subcommand("subshift", "Pattern counting for R, V, W");
  subshift_cmd->add_option("--poly", s.poly, "Sandpile polynomial h (kind R)");
  fg_opts(subshift_cmd, false);
  subshift_cmd->add_option("--kind", s.kind, "R, V or W")->check(CLI::IsMember({"R", "V", "W"}));
  subshift_cmd->add_option("--nmax", s.nmax, "Largest N of Q_N");
  subshift_cmd->add_option("--boundary", s.boundary, "free or collar")->check(CLI::IsMember({"free", "collar"}));
  subshift_cmd->add_option("--emit-dot", s.emit_dot, "Write the presenting graph as DOT");

  auto* cover_cmd = app.add_subcommand("cover-check", "Compare Mahler measures, graph entropies and counting");
  fg_opts(cover_cmd, true);
  cover_cmd->add_option("--nmax", s.nmax, "Largest N for counting");

  app.add_subcommand("reproduce", "Run the worked-example suite");

  auto* run_cmd = app.add_subcommand("run", "Execute a JSON experiment spec");
  run_cmd->add_option("--spec", spec_file, "Spec file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  if (*tol) s.tolerance = tolerance;
  if (*run_cmd) {
    return guarded([&] {
      ExperimentSpec spec = spec_from_json(parse_json(read_file(spec_file), "spec"));
      if (spec.out_dir.empty()) spec.out_dir = s.out_dir;
      if (!spec.tolerance) spec.tolerance = s.tolerance;
      return run(spec);
    });
  }
  s.command = app.get_subcommands().front()->get_name();
  return guarded([&] { return run(s); });
}

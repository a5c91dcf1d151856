#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "harmonic.hpp"
#include "laurent.hpp"
#include "toppling.hpp"
#include "window.hpp"

namespace sandpile {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json bigint_json(const BigInt& c) {
  if (c >= std::numeric_limits<long long>::min() && c <= std::numeric_limits<long long>::max()) return static_cast<long long>(c);
  return c.str();
}

inline BigInt json_bigint(const Json& j) {
  if (j.is_number_integer()) return BigInt(j.get<long long>());
  if (j.is_string()) return BigInt(j.get<std::string>());
  throw std::invalid_argument("expected an integer coefficient");
}

}  // namespace detail

/// [{exponent: [..], coeff: c}, ...] in exponent order.
inline Json to_json(const LaurentPoly& h) {
  Json out = Json::array();
  for (const auto& [e, c] : h.terms()) out.push_back({{"exponent", e}, {"coeff", detail::bigint_json(c)}});
  return out;
}

inline LaurentPoly poly_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("polynomial JSON: expected a non-empty term list");
  const int d = static_cast<int>(j.at(0).at("exponent").size());
  if (d < 1) throw std::invalid_argument("polynomial JSON: empty exponent");
  LaurentPoly p(d);
  for (const auto& t : j) {
    const auto e = t.at("exponent").get<Exponent>();
    if (static_cast<int>(e.size()) != d) throw std::invalid_argument("polynomial JSON: exponent dimension mismatch");
    p.add_term(e, detail::json_bigint(t.at("coeff")));
  }
  return p;
}

/// A polynomial given either as text or as canonical JSON.
inline LaurentPoly poly_from_value(const Json& j) {
  if (j.is_string()) return parse_poly(j.get<std::string>());
  return poly_from_json(j);
}

inline Json to_json(const Window& w) {
  Json out = Json::array();
  for (const auto& s : w.sites()) out.push_back(s);
  return out;
}

inline Window window_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("window JSON: expected a non-empty site list");
  std::vector<Site> sites;
  for (const auto& s : j) sites.push_back(s.get<Site>());
  const int d = static_cast<int>(sites.front().size());
  if (d < 1) throw std::invalid_argument("window JSON: empty site");
  return Window(d, std::move(sites));
}

inline Json to_json(const Config& v) { return {{"window", to_json(*v.window)}, {"heights", v.heights}}; }

inline Config config_from_json(const Json& j) {
  Config v{make_window(window_from_json(j.at("window"))), j.at("heights").get<Heights>()};
  if (v.heights.size() != v.window->size()) throw std::invalid_argument("config JSON: heights do not match window");
  return v;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(what + ": " + e.what());
  }
}

/// "box:..." specs, inline JSON site lists, or a path to a JSON site list.
inline Window parse_window_arg(const std::string& arg) {
  if (arg.rfind("box:", 0) == 0) return parse_window_spec(arg);
  const auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && arg[first] == '[') return window_from_json(parse_json(arg, "window"));
  if (std::filesystem::exists(arg)) return window_from_json(parse_json(read_file(arg), "window file"));
  throw std::invalid_argument("window '" + arg + "': expected box:d=..., a JSON site list, or a file");
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// n1,...,nd,value per site of the truncation box.
inline std::string kernel_csv(const HomoclinicKernel& k) {
  std::string s;
  for (int i = 1; i <= k.dim(); ++i) s += "n" + std::to_string(i) + ",";
  s += "value\n";
  detail::for_each_in_cube(k.dim(), k.radius, [&](const Site& n) {
    for (int x : n) s += std::to_string(x) + ",";
    s += format_real(k.at(n)) + "\n";
  });
  return s;
}

}  // namespace sandpile

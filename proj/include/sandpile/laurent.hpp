#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "roots.hpp"

namespace sandpile {

using BigInt = boost::multiprecision::cpp_int;
using Exponent = std::vector<int>;

inline Exponent operator+(const Exponent& a, const Exponent& b) {
  Exponent r(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] + b[k];
  return r;
}

inline Exponent operator-(const Exponent& a, const Exponent& b) {
  Exponent r(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] - b[k];
  return r;
}

inline Exponent operator-(const Exponent& a) {
  Exponent r(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = -a[k];
  return r;
}

inline bool is_origin(const Exponent& e) {
  return std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
}

/// Element of Z[u_1^{+-1}, ..., u_d^{+-1}]. Terms are keyed by exponent
/// vector; zero coefficients are never stored.
class LaurentPoly {
 public:
  using Terms = std::map<Exponent, BigInt>;

  explicit LaurentPoly(int dim = 1) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("LaurentPoly: dimension must be positive");
  }

  LaurentPoly(int dim, const Terms& terms) : LaurentPoly(dim) {
    for (const auto& [e, c] : terms) add_term(e, c);
  }

  LaurentPoly(int dim, std::initializer_list<std::pair<Exponent, long long>> terms) : LaurentPoly(dim) {
    for (const auto& [e, c] : terms) add_term(e, BigInt(c));
  }

  static LaurentPoly constant(int dim, const BigInt& c) {
    LaurentPoly p(dim);
    p.add_term(Exponent(static_cast<std::size_t>(dim), 0), c);
    return p;
  }

  static LaurentPoly monomial(const Exponent& e, const BigInt& c = 1) {
    LaurentPoly p(static_cast<int>(e.size()));
    p.add_term(e, c);
    return p;
  }

  /// Univariate shorthand: coeffs[k] multiplies u^(lo + k).
  static LaurentPoly univariate(int lo, const std::vector<long long>& coeffs) {
    LaurentPoly p(1);
    for (std::size_t k = 0; k < coeffs.size(); ++k) p.add_term({lo + static_cast<int>(k)}, BigInt(coeffs[k]));
    return p;
  }

  void add_term(const Exponent& e, const BigInt& c) {
    if (static_cast<int>(e.size()) != dim_) throw std::invalid_argument("LaurentPoly: exponent dimension mismatch");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  int dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  BigInt coeff(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? BigInt(0) : it->second;
  }

  long long coeff_ll(const Exponent& e) const { return static_cast<long long>(coeff(e)); }

  std::vector<Exponent> support() const {
    std::vector<Exponent> s;
    s.reserve(terms_.size());
    for (const auto& t : terms_) s.push_back(t.first);
    return s;
  }

  BigInt l1_norm() const {
    BigInt s = 0;
    for (const auto& t : terms_) s += abs(t.second);
    return s;
  }

  /// Per-coordinate min and max exponent over the support.
  std::pair<Exponent, Exponent> bounding_box() const {
    Exponent lo(static_cast<std::size_t>(dim_), 0), hi(static_cast<std::size_t>(dim_), 0);
    bool first = true;
    for (const auto& [e, c] : terms_) {
      for (int k = 0; k < dim_; ++k) {
        if (first || e[k] < lo[k]) lo[k] = e[k];
        if (first || e[k] > hi[k]) hi[k] = e[k];
      }
      first = false;
    }
    return {lo, hi};
  }

  LaurentPoly operator+(const LaurentPoly& o) const {
    check_dim(o);
    LaurentPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
  }

  LaurentPoly operator-() const {
    LaurentPoly r(dim_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
  }

  LaurentPoly operator-(const LaurentPoly& o) const { return *this + (-o); }

  LaurentPoly operator*(const LaurentPoly& o) const {
    check_dim(o);
    LaurentPoly r(dim_);
    for (const auto& [ea, ca] : terms_)
      for (const auto& [eb, cb] : o.terms_) r.add_term(ea + eb, ca * cb);
    return r;
  }

  bool operator==(const LaurentPoly& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

 private:
  void check_dim(const LaurentPoly& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("LaurentPoly: dimension mismatch");
  }

  int dim_;
  Terms terms_;
};

inline LaurentPoly mul(const LaurentPoly& a, const LaurentPoly& b) { return a * b; }

/// h~ = sum h_n u^{-n}.
inline LaurentPoly reflect(const LaurentPoly& h) {
  LaurentPoly r(h.dim());
  for (const auto& [e, c] : h.terms()) r.add_term(-e, c);
  return r;
}

struct Classification {
  bool lopsided = false;
  std::optional<Exponent> dominant_position;
  BigInt dominant_coeff = 0;
  bool sandpile = false;
  bool simple = false;
  BigInt l1_norm = 0;
};

inline Classification classify(const LaurentPoly& h) {
  if (h.is_zero()) throw std::invalid_argument("classify: zero polynomial");
  Classification c;
  c.l1_norm = h.l1_norm();
  for (const auto& [e, v] : h.terms()) {
    if (2 * v > c.l1_norm) {
      if (c.dominant_position) throw std::logic_error("classify: two dominant positions");
      c.dominant_position = e;
      c.dominant_coeff = v;
    }
  }
  c.lopsided = c.dominant_position.has_value();
  if (!c.lopsided) return c;

  c.sandpile = is_origin(*c.dominant_position);
  for (const auto& [e, v] : h.terms())
    if (!is_origin(e) && v > 0) c.sandpile = false;
  if (!c.sandpile) return c;

  c.simple = true;
  for (const auto& [e, v] : h.terms()) {
    if (is_origin(e)) continue;
    int nonzero = 0, total = 0;
    for (int x : e) {
      if (x != 0) ++nonzero;
      total += std::abs(x);
    }
    const bool unit = nonzero == 1 && total == 1;
    if (!unit || v != -1) c.simple = false;
  }
  for (int k = 0; k < h.dim(); ++k) {
    Exponent e(static_cast<std::size_t>(h.dim()), 0);
    e[static_cast<std::size_t>(k)] = 1;
    if (h.coeff(e) != -1 || h.coeff(-e) != -1) c.simple = false;
  }
  return c;
}

/// f with f_n = |g_n|.
inline LaurentPoly associated_plus(const LaurentPoly& g) {
  if (!classify(g).sandpile) throw std::invalid_argument("associated_plus: argument is not a sandpile polynomial");
  LaurentPoly f(g.dim());
  for (const auto& [e, c] : g.terms()) f.add_term(e, abs(c));
  return f;
}

inline std::complex<double> eval_torus(const LaurentPoly& h, const std::vector<double>& t) {
  if (static_cast<int>(t.size()) != h.dim()) throw std::invalid_argument("eval_torus: point dimension mismatch");
  std::complex<double> s = 0.0;
  for (const auto& [e, c] : h.terms()) {
    double phase = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) phase += e[k] * t[k];
    s += static_cast<double>(c) * std::polar(1.0, 2.0 * std::numbers::pi * phase);
  }
  return s;
}

/// Coefficients of u^{-lo} h(u) as an ordinary polynomial, lowest degree first.
inline std::vector<double> shifted_coefficients(const LaurentPoly& h, int* lo_out = nullptr) {
  if (h.dim() != 1) throw std::invalid_argument("shifted_coefficients: univariate polynomial required");
  if (h.is_zero()) throw std::invalid_argument("shifted_coefficients: zero polynomial");
  auto [lo, hi] = h.bounding_box();
  std::vector<double> c(static_cast<std::size_t>(hi[0] - lo[0] + 1), 0.0);
  for (const auto& [e, v] : h.terms()) c[static_cast<std::size_t>(e[0] - lo[0])] = static_cast<double>(v);
  if (lo_out) *lo_out = lo[0];
  return c;
}

struct ExpansivenessCertificate {
  bool expansive = false;
  double min_modulus = 0.0;
  std::string method;
  bool heuristic = false;
};

/// Lopsided polynomials are certified by the coefficient inequality; d = 1 is
/// decided from root moduli; otherwise |h| is sampled on a torus grid, which
/// is evidence rather than proof.
inline ExpansivenessCertificate expansiveness_certificate(const LaurentPoly& h, int grid_resolution = 64) {
  ExpansivenessCertificate cert;
  if (h.is_zero()) {
    cert.method = "zero";
    return cert;
  }
  const BigInt l1 = h.l1_norm();
  BigInt best = 0;
  for (const auto& t : h.terms()) best = std::max(best, BigInt(abs(t.second)));
  if (2 * best > l1) {
    cert.expansive = true;
    cert.min_modulus = static_cast<double>(2 * best - l1);
    cert.method = "lopsided";
    return cert;
  }
  if (h.dim() == 1) {
    const auto roots = polynomial_roots(shifted_coefficients(h));
    double closest = std::numeric_limits<double>::infinity();
    for (const auto& r : roots) closest = std::min(closest, std::abs(std::abs(r) - 1.0));
    cert.expansive = closest > 1e-9;
    cert.method = "roots";
    double m = std::numeric_limits<double>::infinity();
    for (int k = 0; k < grid_resolution; ++k)
      m = std::min(m, std::abs(eval_torus(h, {(k + 0.5) / grid_resolution})));
    cert.min_modulus = cert.expansive ? m : 0.0;
    return cert;
  }
  const int d = h.dim();
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> t(static_cast<std::size_t>(d));
  double m = std::numeric_limits<double>::infinity();
  while (true) {
    for (int k = 0; k < d; ++k) t[k] = static_cast<double>(idx[k]) / grid_resolution;
    m = std::min(m, std::abs(eval_torus(h, t)));
    int k = 0;
    while (k < d && ++idx[k] == grid_resolution) idx[k++] = 0;
    if (k == d) break;
  }
  cert.min_modulus = m;
  cert.expansive = m > 1e-9;
  cert.method = "grid";
  cert.heuristic = true;
  return cert;
}

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error("parse error at position " + std::to_string(pos) + ": " + msg), position(pos) {}
  std::size_t position;
};

namespace detail {

class PolyParser {
 public:
  explicit PolyParser(const std::string& s) : s_(s) {}

  struct Term {
    BigInt coeff;
    std::map<int, int> powers;
  };

  std::vector<Term> parse() {
    std::vector<Term> terms;
    skip();
    if (pos_ == s_.size()) throw ParseError("empty polynomial", pos_);
    bool first = true;
    while (pos_ < s_.size()) {
      int sign = 1;
      if (s_[pos_] == '+' || s_[pos_] == '-') {
        sign = s_[pos_] == '-' ? -1 : 1;
        ++pos_;
        skip();
      } else if (!first) {
        throw ParseError("expected '+' or '-'", pos_);
      }
      Term t = term();
      t.coeff *= sign;
      terms.push_back(std::move(t));
      first = false;
      skip();
    }
    return terms;
  }

 private:
  Term term() {
    Term t{1, {}};
    bool any = false;
    while (true) {
      skip();
      if (pos_ >= s_.size()) throw ParseError("expected coefficient or variable", pos_);
      const char c = s_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        t.coeff *= number();
      } else if (c == 'u') {
        auto [var, power] = variable();
        t.powers[var] += power;
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
      }
      any = true;
      skip();
      if (pos_ < s_.size() && s_[pos_] == '*') {
        ++pos_;
        continue;
      }
      if (pos_ < s_.size() && s_[pos_] == 'u') continue;
      break;
    }
    if (!any) throw ParseError("empty term", pos_);
    return t;
  }

  BigInt number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("expected integer", pos_);
    return BigInt(s_.substr(start, pos_ - start));
  }

  std::pair<int, int> variable() {
    ++pos_;
    int var = 1;
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      const std::size_t at = pos_;
      const BigInt v = number();
      if (v < 1 || v > 64) throw ParseError("variable index out of range", at);
      var = static_cast<int>(v);
    }
    int power = 1;
    skip();
    if (pos_ < s_.size() && s_[pos_] == '^') {
      ++pos_;
      skip();
      int sign = 1;
      if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
        sign = s_[pos_] == '-' ? -1 : 1;
        ++pos_;
      }
      const std::size_t at = pos_;
      const BigInt p = number();
      if (p > 1000000) throw ParseError("exponent too large", at);
      power = sign * static_cast<int>(p);
    }
    return {var, power};
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses expressions such as "-2*u1^-1 + 5 - 2*u1". A bare "u" means u1.
/// The dimension is the largest variable index used, raised to min_dim.
inline LaurentPoly parse_poly(const std::string& text, int min_dim = 1) {
  detail::PolyParser parser(text);
  const auto terms = parser.parse();
  int dim = std::max(min_dim, 1);
  for (const auto& t : terms)
    for (const auto& [var, p] : t.powers) dim = std::max(dim, var);
  LaurentPoly h(dim);
  for (const auto& t : terms) {
    Exponent e(static_cast<std::size_t>(dim), 0);
    for (const auto& [var, p] : t.powers) e[static_cast<std::size_t>(var - 1)] += p;
    h.add_term(e, t.coeff);
  }
  return h;
}

inline std::string to_string(const LaurentPoly& h) {
  if (h.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : h.terms()) {
    const bool neg = c < 0;
    const BigInt mag = neg ? BigInt(-c) : c;
    if (first) {
      if (neg) os << '-';
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    std::vector<std::string> factors;
    for (int k = 0; k < h.dim(); ++k) {
      if (e[k] == 0) continue;
      std::string v = "u" + std::to_string(k + 1);
      if (e[k] != 1) v += "^" + std::to_string(e[k]);
      factors.push_back(v);
    }
    if (mag != 1 || factors.empty()) factors.insert(factors.begin(), mag.str());
    for (std::size_t k = 0; k < factors.size(); ++k) os << (k ? "*" : "") << factors[k];
  }
  return os.str();
}

}  // namespace sandpile

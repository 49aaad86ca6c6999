#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sonc/error.hpp"
#include "sonc/exponent.hpp"
#include "sonc/rational.hpp"

namespace sonc {

struct Term {
  Rational coeff;
  Exponent exponent;
};

class SparsePoly {
 public:
  using TermMap = std::map<Exponent, Rational, GradedOrder>;

  explicit SparsePoly(std::size_t nvars = 0) : nvars_(nvars) {}

  static SparsePoly from_terms(std::size_t nvars, const std::vector<Term>& terms) {
    SparsePoly p(nvars);
    for (const auto& t : terms) p.add_term(t.exponent, t.coeff);
    return p;
  }

  std::size_t nvars() const noexcept { return nvars_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  const TermMap& terms() const noexcept { return terms_; }

  // Merges into an existing coefficient; zero results are erased.
  void add_term(const Exponent& e, const Rational& c) {
    if (e.size() != nvars_) throw PreconditionError("exponent length does not match nvars");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Rational coeff(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  bool contains(const Exponent& e) const { return terms_.count(e) != 0; }

  std::vector<Exponent> support() const {
    std::vector<Exponent> s;
    s.reserve(terms_.size());
    for (const auto& [e, c] : terms_) s.push_back(e);
    return s;
  }

  std::vector<Term> term_list() const {
    std::vector<Term> v;
    v.reserve(terms_.size());
    for (const auto& [e, c] : terms_) v.push_back({c, e});
    return v;
  }

  SparsePoly operator+(const SparsePoly& o) const {
    check_same(o);
    SparsePoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
  }
  SparsePoly operator-(const SparsePoly& o) const {
    check_same(o);
    SparsePoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
    return r;
  }
  SparsePoly& operator+=(const SparsePoly& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  SparsePoly operator-() const { return scaled(Rational(-1)); }
  SparsePoly scaled(const Rational& k) const {
    SparsePoly r(nvars_);
    if (k == 0) return r;
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, c * k);
    return r;
  }

  // Polynomial multiplied by x^shift.
  SparsePoly shifted(const Exponent& shift) const {
    SparsePoly r(nvars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e + shift, c);
    return r;
  }

  friend bool operator==(const SparsePoly& a, const SparsePoly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  std::string to_string() const;

 private:
  void check_same(const SparsePoly& o) const {
    if (o.nvars_ != nvars_) throw PreconditionError("nvars mismatch");
  }

  std::size_t nvars_;
  TermMap terms_;
};

inline std::string monomial_string(const Exponent& e) {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(i + 1);
    if (e[i] != 1) s += "^" + std::to_string(e[i]);
  }
  return s;
}

inline std::string SparsePoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    Rational mag = abs(c);
    if (c < 0) out += first ? "-" : " - ";
    else if (!first) out += " + ";
    std::string mono = monomial_string(e);
    if (mono.empty()) {
      out += sonc::to_string(mag);
    } else {
      if (mag != 1) out += sonc::to_string(mag) + "*";
      out += mono;
    }
    first = false;
  }
  return out;
}

namespace detail {

class PolyParser {
 public:
  PolyParser(std::string_view text, std::size_t nvars) : s_(text), n_(nvars) {}

  SparsePoly run() {
    SparsePoly p(n_);
    skip();
    if (pos_ == s_.size()) throw ParseError("empty polynomial", pos_);
    bool negative = false;
    if (peek() == '+' || peek() == '-') {
      negative = peek() == '-';
      ++pos_;
    }
    term(p, negative);
    while (true) {
      skip();
      if (pos_ == s_.size()) break;
      char op = peek();
      if (op != '+' && op != '-') throw ParseError("expected '+' or '-'", pos_);
      ++pos_;
      term(p, op == '-');
    }
    return p;
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
      ++pos_;
  }
  static bool digit(char c) { return c >= '0' && c <= '9'; }

  std::string digits() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && digit(s_[pos_])) ++pos_;
    if (start == pos_) throw ParseError("expected digits", start);
    return std::string(s_.substr(start, pos_ - start));
  }

  std::int64_t small_int(const char* what) {
    std::size_t at = pos_;
    std::string d = digits();
    if (d.size() > 13) throw ParseError(std::string(what) + " overflow", at);
    std::int64_t v = std::stoll(d);
    if (v > kMaxExponentEntry) throw ParseError(std::string(what) + " overflow", at);
    return v;
  }

  void term(SparsePoly& p, bool negative) {
    skip();
    Rational coeff(1);
    std::vector<std::int64_t> e(n_, 0);
    if (digit(peek())) {
      std::string num = digits();
      std::string den = "1";
      skip();
      if (peek() == '/') {
        ++pos_;
        std::size_t at = pos_;
        den = digits();
        if (Integer(den) == 0) throw ParseError("zero denominator", at);
      }
      coeff = Rational(Integer(num), Integer(den));
      coeff.canonicalize();
      skip();
      if (peek() != '*') {
        p.add_term(Exponent(std::move(e)), negative ? Rational(-coeff) : coeff);
        return;
      }
      ++pos_;
      skip();
    }
    factor(e);
    while (true) {
      skip();
      if (peek() != '*') break;
      ++pos_;
      factor(e);
    }
    p.add_term(Exponent(std::move(e)), negative ? Rational(-coeff) : coeff);
  }

  void factor(std::vector<std::int64_t>& e) {
    skip();
    if (peek() != 'x') throw ParseError("expected variable 'x<i>'", pos_);
    ++pos_;
    std::size_t at = pos_;
    std::int64_t idx = small_int("variable index");
    if (idx < 1 || static_cast<std::size_t>(idx) > n_)
      throw ParseError("variable index " + std::to_string(idx) + " out of range", at);
    std::int64_t power = 1;
    skip();
    if (peek() == '^') {
      ++pos_;
      std::size_t pat = pos_;
      power = small_int("exponent");
      if (power < 1) throw ParseError("exponent must be positive", pat);
    }
    auto& slot = e[static_cast<std::size_t>(idx - 1)];
    if (slot + power > kMaxExponentEntry) throw ParseError("exponent overflow", at);
    slot += power;
  }

  std::string_view s_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline SparsePoly parse_poly(std::string_view text, std::size_t nvars) {
  return detail::PolyParser(text, nvars).run();
}

inline Rational evaluate(const SparsePoly& f, std::span<const Rational> point) {
  if (point.size() != f.nvars()) throw PreconditionError("point dimension mismatch");
  Rational acc(0);
  for (const auto& [e, c] : f.terms()) {
    Rational t = c;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] != 0) t *= pow(point[i], static_cast<unsigned long>(e[i]));
    acc += t;
  }
  return acc;
}

inline double evaluate(const SparsePoly& f, std::span<const double> point) {
  if (point.size() != f.nvars()) throw PreconditionError("point dimension mismatch");
  double acc = 0.0;
  for (const auto& [e, c] : f.terms()) {
    double t = to_double(c);
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] != 0) t *= std::pow(point[i], static_cast<double>(e[i]));
    acc += t;
  }
  return acc;
}

struct SupportSplit {
  std::vector<Exponent> lambda_part;  // even exponent, positive coefficient
  std::vector<Exponent> gamma_part;
};

inline SupportSplit split_support(const SparsePoly& f) {
  SupportSplit s;
  for (const auto& [e, c] : f.terms()) {
    if (e.is_even() && c > 0) s.lambda_part.push_back(e);
    else s.gamma_part.push_back(e);
  }
  return s;
}

inline std::pair<Exponent, SparsePoly> factor_out_monomial(const SparsePoly& f) {
  if (f.is_zero()) throw PreconditionError("cannot factor the zero polynomial");
  std::vector<std::int64_t> m(f.nvars(), kMaxExponentEntry);
  for (const auto& [e, c] : f.terms())
    for (std::size_t i = 0; i < e.size(); ++i) m[i] = std::min(m[i], e[i]);
  Exponent shift(m);
  SparsePoly g(f.nvars());
  for (const auto& [e, c] : f.terms()) g.add_term(e.minus(shift), c);
  return {shift, g};
}

struct SignAssignment {
  std::vector<int> signs;

  explicit SignAssignment(std::vector<int> s) : signs(std::move(s)) {
    for (int v : signs)
      if (v != 1 && v != -1) throw PreconditionError("sign entries must be +1 or -1");
  }
  static SignAssignment identity(std::size_t n) { return SignAssignment(std::vector<int>(n, 1)); }

  // sign of s^e
  int sign_of(const Exponent& e) const {
    int s = 1;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (signs[i] < 0 && e[i] % 2 != 0) s = -s;
    return s;
  }
  bool is_identity() const {
    for (int v : signs)
      if (v != 1) return false;
    return true;
  }
};

inline SparsePoly flip_signs(const SparsePoly& f, const SignAssignment& s) {
  if (s.signs.size() != f.nvars()) throw PreconditionError("sign assignment length mismatch");
  SparsePoly g(f.nvars());
  for (const auto& [e, c] : f.terms()) g.add_term(e, s.sign_of(e) < 0 ? Rational(-c) : c);
  return g;
}

inline SparsePoly substitute_powers(const SparsePoly& f, std::int64_t k) {
  if (k < 1) throw PreconditionError("power substitution needs k >= 1");
  SparsePoly g(f.nvars());
  for (const auto& [e, c] : f.terms()) g.add_term(e.scaled(k), c);
  return g;
}

// Γ terms as (β, d) where f = ... - d x^β.
inline std::vector<std::pair<Exponent, Rational>> gamma_terms(const SparsePoly& f) {
  std::vector<std::pair<Exponent, Rational>> out;
  for (const auto& [e, c] : f.terms())
    if (!(e.is_even() && c > 0)) out.emplace_back(e, -c);
  return out;
}

// Searches {+1,-1}^n for v with d_j * v^{β_j} > 0 for all j.
inline std::optional<SignAssignment> find_sign_assignment(
    std::size_t nvars, const std::vector<std::pair<Exponent, Rational>>& gamma) {
  if (nvars > 30) throw PreconditionError("sign search limited to 30 variables");
  for (const auto& [b, d] : gamma)
    if (d == 0) throw PreconditionError("zero coefficient in sign search");
  const std::uint64_t total = std::uint64_t{1} << nvars;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::vector<int> s(nvars);
    for (std::size_t i = 0; i < nvars; ++i) s[i] = (mask >> i) & 1 ? -1 : 1;
    SignAssignment v(std::move(s));
    bool ok = true;
    for (const auto& [b, d] : gamma) {
      if ((d > 0) != (v.sign_of(b) > 0)) {
        ok = false;
        break;
      }
    }
    if (ok) return v;
  }
  return std::nullopt;
}

}  // namespace sonc

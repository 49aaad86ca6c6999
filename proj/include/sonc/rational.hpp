#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "sonc/error.hpp"

namespace sonc {

using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// "p" for integers, "p/q" otherwise.
inline std::string to_string(const Rational& q) { return q.get_str(); }

// Accepts [-]digits[/digits] with a nonzero denominator.
inline Rational parse_rational(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
  std::size_t digits = 0;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i, ++digits;
  if (digits == 0) throw ParseError("expected digits in rational '" + std::string(text) + "'", i);
  if (i < text.size()) {
    if (text[i] != '/') throw ParseError("unexpected character in rational", i);
    ++i;
    std::size_t den_digits = 0;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i, ++den_digits;
    if (den_digits == 0 || i != text.size()) throw ParseError("malformed denominator", i);
  }
  std::string s(text);
  if (!s.empty() && s[0] == '+') s.erase(0, 1);
  Rational r;
  if (r.set_str(s, 10) != 0) throw ParseError("malformed rational", 0);
  if (r.get_den() == 0) throw ParseError("zero denominator", 0);
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& q) { return q.get_d(); }

inline long double log_abs(const Integer& z) {
  long exp2 = 0;
  double mant = mpz_get_d_2exp(&exp2, z.get_mpz_t());
  return std::log(static_cast<long double>(std::fabs(mant))) +
         static_cast<long double>(exp2) * std::log(2.0L);
}

// ln|q|, usable for values far outside the double range.
inline long double log_abs(const Rational& q) { return log_abs(q.get_num()) - log_abs(q.get_den()); }

inline Rational pow(const Rational& base, unsigned long e) {
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational pow(const Rational& base, long e) {
  if (e >= 0) return pow(base, static_cast<unsigned long>(e));
  if (base == 0) throw PreconditionError("negative power of zero");
  Rational inv = 1 / base;
  return pow(inv, static_cast<unsigned long>(-e));
}

inline Integer lcm(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// Best rational approximation of x by continued fractions, stopping at the
// first convergent within rel_tol * |x|.
inline Rational rationalize(double x, double rel_tol = 1e-12) {
  if (!std::isfinite(x)) throw PreconditionError("cannot rationalize a non-finite value");
  if (x == 0.0) return Rational(0);
  const Rational exact(x);
  const Rational tol = Rational(rel_tol) * abs(exact);
  Rational rest = exact;
  Integer h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
  for (int iter = 0; iter < 200; ++iter) {
    Integer a;
    mpz_fdiv_q(a.get_mpz_t(), rest.get_num_mpz_t(), rest.get_den_mpz_t());
    Integer h = a * h_prev + h_prev2;
    Integer k = a * k_prev + k_prev2;
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    Rational conv(h, k);
    conv.canonicalize();
    if (abs(conv - exact) <= tol) return conv;
    Rational frac = rest - Rational(a);
    if (frac == 0) return conv;
    rest = 1 / frac;
  }
  return exact;
}

}  // namespace sonc

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sonc/circuit.hpp"
#include "sonc/poly.hpp"

namespace sonc {

enum class CertMode { exact, epsilon };

inline const char* to_string(CertMode m) { return m == CertMode::exact ? "exact" : "epsilon"; }

struct CertCircuit {
  CircuitPoly poly;
  // amount removed from the inner coefficient to keep the circuit nonnegative
  std::optional<double> slack;
};

struct SoncCertificate {
  std::size_t nvars = 0;
  std::vector<CertCircuit> circuits;
  std::vector<Term> monomial_squares;
  SparsePoly claimed_sum;
  CertMode mode = CertMode::exact;
  std::optional<double> epsilon;
  std::map<std::string, std::string> info;

  SparsePoly recomposed() const {
    SparsePoly s(nvars);
    for (const auto& c : circuits) s += c.poly.to_poly();
    for (const auto& t : monomial_squares) s.add_term(t.exponent, t.coeff);
    return s;
  }

  std::size_t size() const { return circuits.size() + monomial_squares.size(); }
};

inline double max_abs_coeff(const SparsePoly& f) {
  double m = 0;
  for (const auto& [e, c] : f.terms()) m = std::max(m, std::fabs(to_double(c)));
  return m;
}

// Scale-relative coefficient residual of recomposed - f.
inline double relative_residual(const SoncCertificate& cert, const SparsePoly& f) {
  const SparsePoly r = cert.recomposed() - f;
  return max_abs_coeff(r) / std::max(max_abs_coeff(f), 1e-300);
}

// Multiplies every exponent by x^shift.
inline SoncCertificate shifted(const SoncCertificate& cert, const Exponent& shift) {
  SoncCertificate out = cert;
  for (auto& c : out.circuits) {
    std::vector<Term> outer;
    for (const auto& t : c.poly.outer()) outer.push_back({t.coeff, t.exponent + shift});
    c.poly = CircuitPoly::make(std::move(outer), c.poly.beta() + shift, c.poly.d());
  }
  for (auto& t : out.monomial_squares) t.exponent = t.exponent + shift;
  out.claimed_sum = cert.claimed_sum.shifted(shift);
  return out;
}

// Applies x_k -> s_k x_k.
inline SoncCertificate sign_flipped(const SoncCertificate& cert, const SignAssignment& s) {
  SoncCertificate out = cert;
  for (auto& c : out.circuits) {
    Rational d = c.poly.d();
    if (s.sign_of(c.poly.beta()) < 0) d = -d;
    c.poly = c.poly.with_d(d);
  }
  out.claimed_sum = flip_signs(cert.claimed_sum, s);
  return out;
}

// Merges monomial squares with equal exponents and drops zeros.
inline void normalize_squares(SoncCertificate& cert) {
  SparsePoly sq(cert.nvars);
  for (const auto& t : cert.monomial_squares) sq.add_term(t.exponent, t.coeff);
  cert.monomial_squares = sq.term_list();
}

// weight * (a x^u - b x^v)^2
struct BinomialSquare {
  Rational weight{1};
  Rational a;
  Exponent u;
  Rational b;
  Exponent v;

  SparsePoly expand(std::size_t nvars) const {
    SparsePoly p(nvars);
    p.add_term(u.scaled(2), weight * a * a);
    p.add_term(v.scaled(2), weight * b * b);
    p.add_term(u + v, -2 * weight * a * b);
    return p;
  }
};

struct SbsCertificate {
  std::size_t nvars = 0;
  std::vector<BinomialSquare> squares;
  SparsePoly claimed_sum;
  CertMode mode = CertMode::exact;
  std::optional<double> epsilon;

  SparsePoly expanded() const {
    SparsePoly s(nvars);
    for (const auto& q : squares) s += q.expand(nvars);
    return s;
  }
};

}  // namespace sonc

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sonc/certificate.hpp"
#include "sonc/circuit.hpp"
#include "sonc/poly.hpp"

namespace sonc {

struct VerifyMode {
  CertMode mode = CertMode::exact;
  double epsilon = 0;

  static VerifyMode exact() { return {}; }
  static VerifyMode eps(double e) { return {CertMode::epsilon, e}; }
};

struct CircuitCheck {
  std::size_t index = 0;
  std::optional<ThetaOrder> theta;  // empty when the circuit is malformed
  bool nonnegative = false;
  std::string reason;
};

struct VerificationReport {
  VerifyMode mode;
  SparsePoly sum_residual;  // f - recomposed
  double residual = 0;      // max |residual coeff| / max |coeff of f|
  std::vector<CircuitCheck> per_circuit;
  bool pass = true;
  std::vector<std::string> reasons;

  void fail(std::string why) {
    pass = false;
    reasons.push_back(std::move(why));
  }
};

namespace detail {

inline void check_residual(VerificationReport& r, const SparsePoly& f, const SparsePoly& recomposed) {
  r.sum_residual = f - recomposed;
  r.residual = max_abs_coeff(r.sum_residual) / std::max(max_abs_coeff(f), 1e-300);
  if (f.is_zero() && !r.sum_residual.is_zero()) r.residual = max_abs_coeff(r.sum_residual);
  if (r.mode.mode == CertMode::exact) {
    if (!r.sum_residual.is_zero()) r.fail("recomposed sum differs from f (" + std::to_string(r.sum_residual.size()) + " terms)");
  } else if (!(r.mode.epsilon > 0)) {
    r.fail("epsilon must be positive");
  } else if (!(r.residual <= r.mode.epsilon)) {
    r.fail("relative residual " + std::to_string(r.residual) + " exceeds epsilon");
  }
}

}  // namespace detail

// Recomputes lambdas, circuit numbers and the sum from scratch.
inline VerificationReport verify_sonc(const SoncCertificate& cert, const SparsePoly& f, VerifyMode mode = {}) {
  VerificationReport r;
  r.mode = mode;
  r.sum_residual = SparsePoly(f.nvars());
  if (cert.nvars != f.nvars()) {
    r.fail("certificate has " + std::to_string(cert.nvars) + " variables, f has " + std::to_string(f.nvars()));
    return r;
  }
  SparsePoly sum(f.nvars());
  for (std::size_t i = 0; i < cert.circuits.size(); ++i) {
    const CircuitPoly& raw = cert.circuits[i].poly;
    CircuitCheck chk;
    chk.index = i;
    try {
      const CircuitPoly c = CircuitPoly::make(raw.outer(), raw.beta(), raw.d());
      chk.theta = theta_compare(c);
      chk.nonnegative = is_nonnegative_circuit(c);
      if (!chk.nonnegative) chk.reason = "inner coefficient exceeds the circuit number";
      sum += c.to_poly();
    } catch (const Error& e) {
      chk.reason = e.what();
    }
    if (!chk.nonnegative) r.fail("circuit " + std::to_string(i) + ": " + chk.reason);
    r.per_circuit.push_back(std::move(chk));
  }
  for (const auto& t : cert.monomial_squares) {
    if (t.exponent.size() != f.nvars()) {
      r.fail("monomial square with wrong exponent length");
      continue;
    }
    if (!t.exponent.is_even() || t.coeff <= 0)
      r.fail("monomial term " + t.coeff.get_str() + "*x^" + t.exponent.to_string() + " is not a positive even square");
    sum.add_term(t.exponent, t.coeff);
  }
  detail::check_residual(r, f, sum);
  return r;
}

inline VerificationReport verify_sbs(const SbsCertificate& cert, const SparsePoly& f, VerifyMode mode = {}) {
  VerificationReport r;
  r.mode = mode;
  r.sum_residual = SparsePoly(f.nvars());
  if (cert.nvars != f.nvars()) {
    r.fail("certificate has " + std::to_string(cert.nvars) + " variables, f has " + std::to_string(f.nvars()));
    return r;
  }
  SparsePoly sum(f.nvars());
  for (std::size_t i = 0; i < cert.squares.size(); ++i) {
    const auto& q = cert.squares[i];
    if (q.u.size() != f.nvars() || q.v.size() != f.nvars()) {
      r.fail("square " + std::to_string(i) + " has wrong exponent length");
      continue;
    }
    if (q.weight < 0) r.fail("square " + std::to_string(i) + " has a negative weight");
    sum += q.expand(f.nvars());
  }
  detail::check_residual(r, f, sum);
  return r;
}

}  // namespace sonc

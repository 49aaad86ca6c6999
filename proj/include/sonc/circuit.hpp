#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sonc/error.hpp"
#include "sonc/poly.hpp"
#include "sonc/polytope.hpp"

namespace sonc {

// f = sum_i c_i x^{alpha_i} - d x^beta over a trellis {alpha_i}.
class CircuitPoly {
 public:
  CircuitPoly() = default;

  static CircuitPoly make(std::vector<Term> outer, Exponent beta, Rational d) {
    CircuitPoly c = unchecked(std::move(outer), std::move(beta), std::move(d));
    if (c.outer_.size() < 2) throw InvalidCircuit("a circuit needs at least two outer terms");
    std::vector<Exponent> members;
    for (const auto& t : c.outer_) {
      if (t.coeff <= 0) throw InvalidCircuit("outer coefficient at " + t.exponent.to_string() + " is not positive");
      if (!t.exponent.is_even()) throw InvalidCircuit("outer exponent " + t.exponent.to_string() + " is not even");
      if (t.exponent.size() != c.beta_.size()) throw InvalidCircuit("exponent length mismatch");
      members.push_back(t.exponent);
    }
    if (!affinely_independent(members)) throw InvalidCircuit("outer exponents are affinely dependent");
    auto bc = barycentric(Trellis::make(members), c.beta_);
    if (bc.location != Location::interior)
      throw InvalidCircuit("inner exponent " + c.beta_.to_string() + " is not in the relative interior");
    c.lambdas_ = std::move(bc.lambdas);
    return c;
  }

  // No validation; lambdas stay empty. Used for certificates read from outside.
  static CircuitPoly unchecked(std::vector<Term> outer, Exponent beta, Rational d) {
    CircuitPoly c;
    c.outer_ = std::move(outer);
    c.beta_ = std::move(beta);
    c.d_ = std::move(d);
    return c;
  }

  const std::vector<Term>& outer() const noexcept { return outer_; }
  const Exponent& beta() const noexcept { return beta_; }
  const Rational& d() const noexcept { return d_; }
  const std::vector<Rational>& lambdas() const noexcept { return lambdas_; }
  bool validated() const noexcept { return !lambdas_.empty(); }
  std::size_t nvars() const noexcept { return beta_.size(); }

  std::vector<Exponent> members() const {
    std::vector<Exponent> m;
    for (const auto& t : outer_) m.push_back(t.exponent);
    return m;
  }

  SparsePoly to_poly() const {
    SparsePoly p(nvars());
    for (const auto& t : outer_) p.add_term(t.exponent, t.coeff);
    p.add_term(beta_, -d_);
    return p;
  }

  CircuitPoly scaled(const Rational& mu) const {
    CircuitPoly c = *this;
    for (auto& t : c.outer_) t.coeff *= mu;
    c.d_ *= mu;
    return c;
  }

  CircuitPoly with_d(Rational d) const {
    CircuitPoly c = *this;
    c.d_ = std::move(d);
    return c;
  }

 private:
  std::vector<Term> outer_;
  Exponent beta_;
  Rational d_;
  std::vector<Rational> lambdas_;
};

struct CircuitNumber {
  long double log_value = 0;
  std::vector<Rational> coeffs;
  std::vector<Rational> lambdas;

  double value() const { return static_cast<double>(std::exp(log_value)); }
};

inline CircuitNumber circuit_number(const CircuitPoly& c) {
  if (!c.validated()) throw InvalidCircuit("circuit number needs a validated circuit");
  CircuitNumber th;
  for (std::size_t i = 0; i < c.outer().size(); ++i) {
    const Rational& ci = c.outer()[i].coeff;
    const Rational& li = c.lambdas()[i];
    th.log_value += static_cast<long double>(li.get_d()) * (log_abs(ci) - log_abs(li));
    th.coeffs.push_back(ci);
    th.lambdas.push_back(li);
  }
  return th;
}

enum class ThetaOrder { d_below, d_equal, d_above };

inline const char* to_string(ThetaOrder t) {
  switch (t) {
    case ThetaOrder::d_below: return "d_below";
    case ThetaOrder::d_equal: return "d_equal";
    default: return "d_above";
  }
}

// Exact trichotomy of |d| against the circuit number.
inline ThetaOrder theta_compare(const CircuitPoly& c) {
  if (c.d() == 0) return ThetaOrder::d_below;
  const CircuitNumber th = circuit_number(c);
  const long double log_d = log_abs(c.d());
  const long double diff = log_d - th.log_value;
  const long double margin = 1e-12L * (1.0L + std::fabs(log_d) + std::fabs(th.log_value));
  if (diff > margin) return ThetaOrder::d_above;
  if (diff < -margin) return ThetaOrder::d_below;
  Integer n = 1;
  for (const auto& l : th.lambdas) n = lcm(n, l.get_den());
  if (!n.fits_ulong_p()) throw NumericalFailure("lambda denominators too large for exact comparison");
  const unsigned long big_n = n.get_ui();
  Rational lhs = pow(Rational(abs(c.d())), big_n);
  Rational rhs(1);
  for (std::size_t i = 0; i < th.lambdas.size(); ++i) {
    Rational e = th.lambdas[i] * Rational(n);
    rhs *= pow(Rational(th.coeffs[i] / th.lambdas[i]), e.get_num().get_ui());
  }
  int s = cmp(lhs, rhs);
  return s < 0 ? ThetaOrder::d_below : (s == 0 ? ThetaOrder::d_equal : ThetaOrder::d_above);
}

inline bool is_nonnegative_circuit(const CircuitPoly& c) {
  if (c.d() == 0) return true;
  if (c.beta().is_even() && c.d() < 0) return true;
  return theta_compare(c) != ThetaOrder::d_above;
}

// The positive zero of the circuit with d replaced by its circuit number.
inline std::vector<double> circuit_zero(const CircuitPoly& c) {
  if (!c.validated()) throw InvalidCircuit("circuit zero needs a validated circuit");
  const CircuitNumber th = circuit_number(c);
  const auto members = c.members();
  const auto coords = affine_coordinates(members);
  const std::size_t m = members.size(), k = coords.size();
  Eigen::MatrixXd a(m, k);
  Eigen::VectorXd rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>(members[i][coords[j]] - c.beta()[coords[j]]);
    rhs(static_cast<Eigen::Index>(i)) = static_cast<double>(
        log_abs(th.lambdas[i]) + th.log_value - log_abs(th.coeffs[i]));
  }
  Eigen::VectorXd z = a.colPivHouseholderQr().solve(rhs);
  const double resid = (a * z - rhs).lpNorm<Eigen::Infinity>();
  if (!(resid <= 1e-10 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>())))
    throw NumericalFailure("balancing system residual too large", resid);
  std::vector<double> x(c.nvars(), 1.0);
  for (std::size_t j = 0; j < k; ++j) x[coords[j]] = std::exp(z(static_cast<Eigen::Index>(j)));
  return x;
}

enum class CircuitShape { circuit, monomial_squares, not_circuit };

struct CircuitDetection {
  CircuitShape shape = CircuitShape::not_circuit;
  std::optional<CircuitPoly> circuit;
  std::string reason;
};

// Recognises f as a trellis of positive even terms plus at most one inner term.
inline CircuitDetection detect_circuit(const SparsePoly& f) {
  CircuitDetection r;
  if (f.is_zero()) {
    r.reason = "zero polynomial";
    return r;
  }
  auto terms = f.term_list();
  auto positive_trellis = [](const std::vector<Term>& ts) {
    std::vector<Exponent> m;
    for (const auto& t : ts) {
      if (t.coeff <= 0 || !t.exponent.is_even()) return false;
      m.push_back(t.exponent);
    }
    return affinely_independent(m);
  };
  if (positive_trellis(terms)) {
    r.shape = CircuitShape::monomial_squares;
    return r;
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    std::vector<Term> rest;
    for (std::size_t j = 0; j < terms.size(); ++j)
      if (j != i) rest.push_back(terms[j]);
    if (rest.size() < 2 || !positive_trellis(rest)) continue;
    std::vector<Exponent> m;
    for (const auto& t : rest) m.push_back(t.exponent);
    if (barycentric(Trellis::make(m), terms[i].exponent).location != Location::interior) continue;
    r.shape = CircuitShape::circuit;
    r.circuit = CircuitPoly::make(rest, terms[i].exponent, -terms[i].coeff);
    return r;
  }
  r.reason = "no term splits the support into a trellis and one relative-interior point";
  return r;
}

}  // namespace sonc

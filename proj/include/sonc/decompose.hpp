#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sonc/certificate.hpp"
#include "sonc/circuit.hpp"
#include "sonc/critical.hpp"
#include "sonc/lp.hpp"
#include "sonc/necessary.hpp"
#include "sonc/polytope.hpp"

namespace sonc {

struct SystemColumn {
  std::size_t gamma_index = 0;  // which inner term the circuit serves
  BarycentricCoords circuit;
};

// Linear feasibility system in the circuit scalings s.
// Rows: one per outer exponent, then (multi variant) one per inner exponent.
struct CircuitSystem {
  LinearSystem system;
  std::vector<Exponent> outer_rows;
  std::vector<Exponent> inner_rows;  // empty for the single variant
  std::vector<SystemColumn> columns;
  std::vector<Rational> x_star;
  std::vector<Exponent> betas;  // every inner exponent, in gamma order
};

enum class Verdict { sonc, not_sonc, not_psd, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::sonc: return "SONC";
    case Verdict::not_sonc: return "NotSONC";
    case Verdict::not_psd: return "NotPSD";
    case Verdict::inconclusive: return "Inconclusive";
  }
  return "?";
}

struct DecomposeOutcome {
  Verdict verdict = Verdict::inconclusive;
  std::optional<SoncCertificate> certificate;
  std::optional<CircuitSystem> system;  // infeasible system for NotSONC, or attached to Inconclusive
  std::optional<LpResult> lp;
  std::optional<std::vector<Rational>> point;  // NotPSD: f(point) < 0
  std::string reason;
};

struct DecomposeOptions {
  CriticalOptions critical;
  bool prune = true;
  double boundary_tol = 1e-9;
  double epsilon = 1e-8;
};

namespace detail {

inline double monomial_value(const Exponent& e, std::span<const double> x) {
  long double s = 0;
  for (std::size_t k = 0; k < e.size(); ++k)
    if (e[k] != 0) s += static_cast<long double>(e[k]) * std::log(static_cast<long double>(x[k]));
  return static_cast<double>(std::exp(s));
}

inline std::vector<Rational> rationalize_point(const std::vector<double>& x) {
  std::vector<Rational> r;
  for (double v : x) r.push_back(rationalize(v));
  return r;
}

inline std::vector<double> to_doubles(const std::vector<Rational>& x) {
  std::vector<double> r;
  for (const auto& v : x) r.push_back(to_double(v));
  return r;
}

inline std::vector<Term> outer_terms(const SparsePoly& f) {
  std::vector<Term> out;
  for (const auto& [e, c] : f.terms())
    if (e.is_even() && c > 0) out.push_back({c, e});
  return out;
}

inline std::vector<Exponent> exponents_of(const std::vector<Term>& ts) {
  std::vector<Exponent> v;
  for (const auto& t : ts) v.push_back(t.exponent);
  return v;
}

inline std::size_t row_of(const std::vector<Exponent>& rows, const Exponent& e) {
  return static_cast<std::size_t>(std::find(rows.begin(), rows.end(), e) - rows.begin());
}

}  // namespace detail

// Rows c_i x^{alpha_i}, columns lambda_k of every circuit through the single inner exponent.
inline CircuitSystem build_single_system(const SparsePoly& f, const CriticalPoint& cp,
                                         const std::vector<BarycentricCoords>& circuits) {
  CircuitSystem cs;
  const auto outer = detail::outer_terms(f);
  cs.outer_rows = detail::exponents_of(outer);
  for (const auto& [b, d] : gamma_terms(f)) cs.betas.push_back(b);
  cs.x_star = detail::rationalize_point(cp.x_star);
  const auto x = detail::to_doubles(cs.x_star);
  const std::size_t m = outer.size();
  RationalMatrix a(m, circuits.size());
  std::vector<Rational> rhs(m);
  for (std::size_t i = 0; i < m; ++i) rhs[i] = rationalize(to_double(outer[i].coeff) * detail::monomial_value(outer[i].exponent, x));
  for (std::size_t k = 0; k < circuits.size(); ++k) {
    for (std::size_t t = 0; t < circuits[k].trellis.size(); ++t)
      a(detail::row_of(cs.outer_rows, circuits[k].trellis[t]), k) = circuits[k].lambdas[t];
    cs.columns.push_back({cp.which_beta, circuits[k]});
  }
  cs.system = LinearSystem(std::move(a), std::move(rhs));
  return cs;
}

// Adds one row per inner exponent: sum_k s_jk = d_j x^{beta_j}; the freed term uses d_star.
inline CircuitSystem build_multi_system(const SparsePoly& f, const CriticalPoint& cp,
                                        const std::vector<std::vector<BarycentricCoords>>& circuits_per_beta) {
  CircuitSystem cs;
  const auto outer = detail::outer_terms(f);
  const auto gamma = gamma_terms(f);
  if (circuits_per_beta.size() != gamma.size()) throw PreconditionError("one circuit list per inner term is required");
  cs.outer_rows = detail::exponents_of(outer);
  for (const auto& [b, d] : gamma) {
    cs.betas.push_back(b);
    cs.inner_rows.push_back(b);
  }
  cs.x_star = detail::rationalize_point(cp.x_star);
  const auto x = detail::to_doubles(cs.x_star);
  const std::size_t m = outer.size(), l = gamma.size();
  std::size_t cols = 0;
  for (const auto& list : circuits_per_beta) cols += list.size();
  RationalMatrix a(m + l, cols);
  std::vector<Rational> rhs(m + l);
  for (std::size_t i = 0; i < m; ++i) rhs[i] = rationalize(to_double(outer[i].coeff) * detail::monomial_value(outer[i].exponent, x));
  for (std::size_t j = 0; j < l; ++j) {
    const double dj = j == cp.which_beta ? cp.d_star : to_double(gamma[j].second);
    rhs[m + j] = rationalize(dj * detail::monomial_value(gamma[j].first, x));
  }
  std::size_t col = 0;
  for (std::size_t j = 0; j < l; ++j)
    for (const auto& c : circuits_per_beta[j]) {
      for (std::size_t t = 0; t < c.trellis.size(); ++t) a(detail::row_of(cs.outer_rows, c.trellis[t]), col) = c.lambdas[t];
      a(m + j, col) = 1;
      cs.columns.push_back({j, c});
      ++col;
    }
  cs.system = LinearSystem(std::move(a), std::move(rhs));
  return cs;
}

// Solves the system; when the rounded right-hand side has left the column
// space it is first projected back onto it.
inline LpResult solve_circuit_system(CircuitSystem& cs) {
  if (!solvable(cs.system) && cs.system.cols() > 0) {
    auto p = project_onto_column_space(cs.system.matrix, cs.system.rhs);
    cs.system = LinearSystem(cs.system.matrix, std::move(p));
  }
  return nonneg_solve(cs.system);
}

inline double relative_infeasibility(const CircuitSystem& cs, const LpResult& r) {
  double scale = 0;
  for (const auto& v : cs.system.rhs) scale += std::fabs(to_double(v));
  return to_double(r.phase_one_value) / std::max(scale, 1e-300);
}

// Feasible, or infeasible only at rounding level: the phase-I minimiser is
// then an adequate solution since assembly re-fixes every sum exactly.
inline std::optional<std::vector<Rational>> usable_solution(const CircuitSystem& cs, const LpResult& r, double tol) {
  if (r.feasible()) return r.solution;
  if (r.status == LpStatus::infeasible && relative_infeasibility(cs, r) <= tol) return r.solution;
  return std::nullopt;
}

namespace detail {

// Adjusts the largest entry of vals so that they sum to target exactly.
inline void fix_sum(std::vector<Rational*>& vals, const Rational& target) {
  if (vals.empty()) return;
  Rational s(0);
  std::size_t big = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    s += *vals[i];
    if (abs(*vals[i]) > abs(*vals[big])) big = i;
  }
  *vals[big] += target - s;
}

}  // namespace detail

// Turns a nonnegative solution into circuits: c_ik = lambda_ik s_k / x^{alpha_i},
// d_k = factor_j s_k / x^{beta_j}. Coefficients are rationalized and corrected so
// the certificate sums to f exactly; circuits that end up above their circuit
// number are shrunk, which switches the certificate to epsilon mode.
inline SoncCertificate assemble_certificate(const SparsePoly& f, const CircuitSystem& cs, const std::vector<Rational>& s,
                                            const std::vector<double>& inner_factor, double epsilon = 1e-8) {
  const auto x = detail::to_doubles(cs.x_star);
  const auto outer = detail::outer_terms(f);
  const auto gamma = gamma_terms(f);
  struct Pending {
    std::size_t j;
    std::vector<Term> outer;
    Rational d;
  };
  std::vector<Pending> pend;
  for (std::size_t k = 0; k < cs.columns.size(); ++k) {
    if (s[k] <= 0) continue;
    const auto& col = cs.columns[k];
    const double sk = to_double(s[k]);
    Pending p;
    p.j = col.gamma_index;
    for (std::size_t t = 0; t < col.circuit.trellis.size(); ++t) {
      const Exponent& a = col.circuit.trellis[t];
      p.outer.push_back({rationalize(to_double(col.circuit.lambdas[t]) * sk / detail::monomial_value(a, x)), a});
    }
    p.d = rationalize(inner_factor[col.gamma_index] * sk / detail::monomial_value(gamma[col.gamma_index].first, x));
    pend.push_back(std::move(p));
  }
  // exact outer sums
  SoncCertificate cert;
  cert.nvars = f.nvars();
  cert.claimed_sum = f;
  for (const auto& o : outer) {
    std::vector<Rational*> vals;
    for (auto& p : pend)
      for (auto& t : p.outer)
        if (t.exponent == o.exponent) vals.push_back(&t.coeff);
    if (vals.empty()) cert.monomial_squares.push_back(o);
    else detail::fix_sum(vals, o.coeff);
  }
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    std::vector<Rational*> vals;
    for (auto& p : pend)
      if (p.j == j) vals.push_back(&p.d);
    if (vals.empty()) throw NumericalFailure("inner term " + gamma[j].first.to_string() + " is not covered by any circuit");
    detail::fix_sum(vals, gamma[j].second);
  }
  for (auto& p : pend) {
    for (const auto& t : p.outer)
      if (t.coeff <= 0) throw NumericalFailure("rounded circuit coefficient is not positive");
    CircuitPoly c = CircuitPoly::make(p.outer, gamma[p.j].first, p.d);
    CertCircuit cc{c, std::nullopt};
    if (theta_compare(c) == ThetaOrder::d_above) {
      bool fixed = false;
      for (double eta = 1e-12; eta <= 1e-6; eta *= 10) {
        Rational d = rationalize(to_double(p.d) * (1 - eta));
        CircuitPoly shrunk = c.with_d(d);
        if (theta_compare(shrunk) != ThetaOrder::d_above) {
          cc.poly = shrunk;
          cc.slack = to_double(p.d - d);
          fixed = true;
          break;
        }
      }
      if (!fixed) throw NumericalFailure("assembled circuit exceeds its circuit number");
      cert.mode = CertMode::epsilon;
    }
    cert.circuits.push_back(std::move(cc));
  }
  if (cert.mode == CertMode::epsilon) {
    cert.epsilon = epsilon;
    const double res = relative_residual(cert, f);
    if (res > epsilon) throw NumericalFailure("certificate residual exceeds epsilon", res);
  }
  return cert;
}

// Scales every inner coefficient of a certificate at d* by d/d*.
inline SoncCertificate scale_to_requested_d(const SoncCertificate& cert, const Rational& d, const Rational& d_star) {
  if (d_star <= 0) throw PreconditionError("d* must be positive");
  if (abs(d) > d_star) throw PreconditionError("requested coefficient exceeds d*");
  const Rational r = d / d_star;
  SoncCertificate out = cert;
  out.circuits.clear();
  SparsePoly sum(cert.nvars);
  for (const auto& c : cert.circuits) {
    Rational nd = c.poly.d() * r;
    if (nd == 0) {
      for (const auto& t : c.poly.outer()) out.monomial_squares.push_back(t);
      continue;
    }
    CertCircuit cc{c.poly.with_d(nd), c.slack ? std::optional<double>(*c.slack * to_double(r)) : std::nullopt};
    out.circuits.push_back(std::move(cc));
  }
  normalize_squares(out);
  SparsePoly claimed = cert.claimed_sum;
  for (const auto& c : cert.circuits) claimed.add_term(c.poly.beta(), c.poly.d() * (1 - r));
  out.claimed_sum = claimed;
  return out;
}

// Restricts the certificate to a basic feasible solution of
// sum mu_k C_k + sum nu_e x^e = recomposed sum, mu, nu >= 0.
inline SoncCertificate prune_certificate(const SoncCertificate& cert) {
  const SparsePoly target = cert.recomposed();
  if (cert.circuits.empty()) return cert;
  std::vector<Exponent> rows = target.support();
  auto row = [&](const Exponent& e) -> std::optional<std::size_t> {
    auto it = std::find(rows.begin(), rows.end(), e);
    if (it == rows.end()) return std::nullopt;
    return static_cast<std::size_t>(it - rows.begin());
  };
  std::vector<std::size_t> square_rows;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].is_even() && target.coeff(rows[i]) > 0) square_rows.push_back(i);
  const std::size_t nc = cert.circuits.size();
  RationalMatrix a(rows.size(), nc + square_rows.size());
  for (std::size_t k = 0; k < nc; ++k) {
    const SparsePoly ck = cert.circuits[k].poly.to_poly();
    for (const auto& [e, c] : ck.terms()) {
      auto r = row(e);
      if (!r) return cert;  // cancelling support outside the sum; leave untouched
      a(*r, k) = c;
    }
  }
  for (std::size_t q = 0; q < square_rows.size(); ++q) a(square_rows[q], nc + q) = 1;
  std::vector<Rational> rhs;
  for (const auto& e : rows) rhs.push_back(target.coeff(e));
  auto res = nonneg_solve(LinearSystem(std::move(a), std::move(rhs)));
  if (!res.feasible()) return cert;
  SoncCertificate out = cert;
  out.circuits.clear();
  out.monomial_squares.clear();
  for (std::size_t k = 0; k < nc; ++k) {
    const Rational& mu = res.solution[k];
    if (mu == 0) continue;
    const auto& c = cert.circuits[k];
    out.circuits.push_back({c.poly.scaled(mu), c.slack ? std::optional<double>(*c.slack * to_double(mu)) : std::nullopt});
  }
  for (std::size_t q = 0; q < square_rows.size(); ++q)
    if (res.solution[nc + q] != 0) out.monomial_squares.push_back({res.solution[nc + q], rows[square_rows[q]]});
  return out;
}

namespace detail {

inline DecomposeOutcome make_not_psd(std::vector<Rational> point, std::string reason) {
  DecomposeOutcome o;
  o.verdict = Verdict::not_psd;
  o.point = std::move(point);
  o.reason = std::move(reason);
  return o;
}

inline DecomposeOutcome make_inconclusive(std::string reason) {
  DecomposeOutcome o;
  o.verdict = Verdict::inconclusive;
  o.reason = std::move(reason);
  return o;
}

inline DecomposeOutcome make_sonc(SoncCertificate cert, const DecomposeOptions& opt) {
  DecomposeOutcome o;
  o.verdict = Verdict::sonc;
  if (opt.prune) {
    auto info = cert.info;
    cert = prune_certificate(cert);
    cert.info = info;
  }
  o.certificate = std::move(cert);
  return o;
}

// Exact check that f is negative at the rationalized point.
inline std::optional<std::vector<Rational>> negative_at(const SparsePoly& f, const std::vector<double>& x) {
  auto p = rationalize_point(x);
  if (evaluate(f, p) < 0) return p;
  return std::nullopt;
}

inline DecomposeOutcome single_pipeline(const SparsePoly& f, const DecomposeOptions& opt) {
  const auto gamma = gamma_terms(f);
  const Rational& d = gamma[0].second;
  CriticalPoint cp;
  try {
    cp = critical_point_single(f, opt.critical);
  } catch (const NumericalFailure& e) {
    return make_inconclusive(std::string("critical point: ") + e.what());
  }
  const double dd = to_double(d), ds = cp.d_star;
  if (dd >= ds) {
    if (auto p = negative_at(f, cp.x_star)) return make_not_psd(*p, "inner coefficient exceeds d* = " + std::to_string(ds));
    if (dd > ds * (1 + opt.boundary_tol)) return make_inconclusive("inner coefficient above d* but negativity not confirmed");
  }
  const auto lambda = split_support(f).lambda_part;
  auto circuits = enumerate_circuits(PointSet(lambda), gamma[0].first);
  CircuitSystem cs = build_single_system(f, cp, circuits);
  LpResult lp = solve_circuit_system(cs);
  auto sol = usable_solution(cs, lp, opt.boundary_tol);
  if (!sol) {
    DecomposeOutcome o = make_inconclusive(lp.status == LpStatus::pivot_limit ? "pivot limit reached"
                                                                              : "single-term system infeasible at the critical point");
    o.system = cs;
    o.lp = lp;
    return o;
  }
  try {
    auto cert = assemble_certificate(f, cs, *sol, {dd / ds}, opt.epsilon);
    cert.info["pipeline"] = "single";
    cert.info["d_star"] = std::to_string(ds);
    return make_sonc(std::move(cert), opt);
  } catch (const Error& e) {
    return make_inconclusive(std::string("assembly: ") + e.what());
  }
}

inline std::vector<std::size_t> freeing_order(const std::vector<std::pair<Exponent, Rational>>& gamma) {
  std::vector<std::size_t> idx(gamma.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const Rational da = abs(gamma[a].second), db = abs(gamma[b].second);
    if (da != db) return da > db;
    return a > b;
  });
  return idx;
}

inline DecomposeOutcome multi_pipeline(const SparsePoly& f, const DecomposeOptions& opt) {
  const auto gamma = gamma_terms(f);
  const auto lambda = split_support(f).lambda_part;
  std::vector<Exponent> betas;
  for (const auto& [b, d] : gamma) betas.push_back(b);
  const bool same_side = same_side_check(PointSet(lambda), betas);
  const bool simple = simple_vertex_check(PointSet(lambda));
  std::vector<std::vector<BarycentricCoords>> circuits;
  for (const auto& b : betas) circuits.push_back(enumerate_circuits(PointSet(lambda), b));

  std::string notes;
  std::optional<CircuitSystem> last_system;
  std::optional<LpResult> last_lp;
  auto annotate = [&](SoncCertificate& cert, std::size_t l, double ds) {
    cert.info["pipeline"] = "multi";
    cert.info["freed"] = betas[l].to_string();
    cert.info["d_star"] = std::to_string(ds);
    cert.info["same_side"] = same_side ? "true" : "false";
    cert.info["simple_vertex"] = simple ? "true" : "false";
  };

  for (std::size_t l : freeing_order(gamma)) {
    const double dl = to_double(gamma[l].second);
    CriticalPoint cp;
    try {
      cp = critical_point_multi(f, l, opt.critical);
    } catch (const NumericalFailure& e) {
      notes += "freeing " + betas[l].to_string() + ": " + e.what() + "; ";
      continue;
    }
    if (cp.stopped_below || dl > cp.d_star) {
      if (auto p = negative_at(f, cp.x_star)) return make_not_psd(*p, "objective drops below the inner coefficient at " + betas[l].to_string());
      if (cp.stopped_below || dl > cp.d_star * (1 + opt.boundary_tol)) {
        notes += "freeing " + betas[l].to_string() + ": above d* but negativity not confirmed; ";
        continue;
      }
    }
    const double ds = cp.d_star;
    const bool boundary = std::fabs(dl - ds) <= opt.boundary_tol * ds;
    if (boundary) {
      CircuitSystem cs = build_multi_system(f, cp, circuits);
      LpResult lp = solve_circuit_system(cs);
      if (auto sol = usable_solution(cs, lp, opt.boundary_tol)) {
        try {
          std::vector<double> factor(gamma.size(), 1.0);
          factor[l] = dl / ds;
          auto cert = assemble_certificate(f, cs, *sol, factor, opt.epsilon);
          annotate(cert, l, ds);
          return make_sonc(std::move(cert), opt);
        } catch (const Error& e) {
          notes += std::string("assembly: ") + e.what() + "; ";
          continue;
        }
      }
      if (lp.status == LpStatus::infeasible && relative_infeasibility(cs, lp) > opt.boundary_tol) {
        DecomposeOutcome o;
        o.verdict = Verdict::not_sonc;
        o.reason = "circuit system at the boundary zero has no nonnegative solution";
        if (evaluate(f, cs.x_star) == 0) o.reason += " (f vanishes exactly at the zero)";
        o.system = cs;
        o.lp = lp;
        return o;
      }
      last_system = cs;
      last_lp = lp;
      notes += "freeing " + betas[l].to_string() + ": boundary system not decided; ";
      continue;
    }
    // interior: solve at inflated other coefficients so every circuit keeps a margin
    const double sigma = (ds - dl) / ds;
    const Rational rho = rationalize(1 - std::min(1e-7, sigma / 4));
    SparsePoly inflated = f;
    for (std::size_t j = 0; j < gamma.size(); ++j)
      if (j != l) inflated.add_term(betas[j], -(gamma[j].second / rho - gamma[j].second));
    std::vector<double> factor(gamma.size(), to_double(rho));
    std::optional<CriticalPoint> cpr;
    try {
      cpr = critical_point_multi(inflated, l, opt.critical);
      if (cpr->stopped_below || to_double(gamma[l].second / rho) > cpr->d_star) cpr.reset();
    } catch (const NumericalFailure&) {
      cpr.reset();
    }
    CircuitSystem cs = cpr ? build_multi_system(inflated, *cpr, circuits) : build_multi_system(f, cp, circuits);
    if (cpr) factor[l] = dl / cpr->d_star;
    else {
      std::fill(factor.begin(), factor.end(), 1.0);
      factor[l] = dl / ds;
    }
    LpResult lp = solve_circuit_system(cs);
    auto sol = usable_solution(cs, lp, opt.boundary_tol);
    if (!sol) {
      last_system = cs;
      last_lp = lp;
      notes += "freeing " + betas[l].to_string() + ": system infeasible; ";
      continue;
    }
    try {
      auto cert = assemble_certificate(f, cs, *sol, factor, opt.epsilon);
      annotate(cert, l, ds);
      return make_sonc(std::move(cert), opt);
    } catch (const Error& e) {
      notes += std::string("assembly: ") + e.what() + "; ";
    }
  }
  DecomposeOutcome o = make_inconclusive(notes.empty() ? "no inner term could be freed" : notes);
  o.system = last_system;
  o.lp = last_lp;
  return o;
}

inline SoncCertificate squares_certificate(const SparsePoly& f) {
  SoncCertificate cert;
  cert.nvars = f.nvars();
  cert.claimed_sum = f;
  cert.monomial_squares = f.term_list();
  return cert;
}

inline SoncCertificate merge(const SoncCertificate& a, const SoncCertificate& b, const SparsePoly& f) {
  SoncCertificate out = a;
  out.circuits.insert(out.circuits.end(), b.circuits.begin(), b.circuits.end());
  out.monomial_squares.insert(out.monomial_squares.end(), b.monomial_squares.begin(), b.monomial_squares.end());
  normalize_squares(out);
  out.claimed_sum = f;
  if (b.mode == CertMode::epsilon) {
    out.mode = CertMode::epsilon;
    out.epsilon = std::max(a.epsilon.value_or(0), b.epsilon.value_or(0));
  }
  for (const auto& [k, v] : b.info) out.info.emplace(k, v);
  return out;
}

inline DecomposeOutcome decompose_impl(const SparsePoly& f, const DecomposeOptions& opt, int depth);

inline DecomposeOutcome face_pipeline(const SparsePoly& f, const std::vector<Exponent>& face, const DecomposeOptions& opt,
                                      int depth) {
  SparsePoly g(f.nvars());
  for (const auto& [e, c] : f.terms())
    if (in_convex_hull(face, to_point(e))) g.add_term(e, c);
  DecomposeOutcome og = decompose_impl(g, opt, depth + 1);
  switch (og.verdict) {
    case Verdict::not_psd: {
      auto w = lift_face_witness(f, g.support(), *og.point);
      if (w && evaluate(f, *w) < 0) return make_not_psd(*w, "face restriction is negative: " + og.reason);
      return make_inconclusive("face restriction is not PSD but the witness did not lift");
    }
    case Verdict::not_sonc:
      og.reason = "restriction to a face is not SONC: " + og.reason;
      return og;
    case Verdict::inconclusive:
      return og;
    case Verdict::sonc:
      break;
  }
  // shrink each face circuit to the smallest outer part its inner coefficient needs
  SoncCertificate face_part = *og.certificate;
  for (auto& c : face_part.circuits) {
    const double ratio = std::fabs(to_double(c.poly.d())) / circuit_number(c.poly).value();
    if (!(ratio < 1)) continue;
    const Rational mu = rationalize(std::min(1.0, ratio * (1 + 1e-10)));
    std::vector<Term> outer = c.poly.outer();
    for (auto& t : outer) t.coeff *= mu;
    CircuitPoly tight = CircuitPoly::make(outer, c.poly.beta(), c.poly.d());
    if (mu > 0 && theta_compare(tight) != ThetaOrder::d_above) c.poly = tight;
  }
  SparsePoly rest = f;
  for (const auto& c : face_part.circuits) rest = rest - c.poly.to_poly();
  DecomposeOutcome oh = decompose_impl(rest, opt, depth + 1);
  if (oh.verdict != Verdict::sonc) {
    return make_inconclusive("face part certified but the remainder was not (" + std::string(to_string(oh.verdict)) + ": " +
                             oh.reason + ")");
  }
  face_part.monomial_squares.clear();
  return make_sonc(merge(face_part, *oh.certificate, f), opt);
}

inline DecomposeOutcome decompose_impl(const SparsePoly& f, const DecomposeOptions& opt, int depth) {
  if (depth > 64) return make_inconclusive("recursion limit");
  if (f.is_zero()) return make_sonc(squares_certificate(f), opt);
  const auto nec = necessary_conditions(f);
  if (!nec.pass) {
    auto w = necessary_witness(f, nec);
    if (w) return make_not_psd(*w, nec.describe());
    return make_inconclusive("necessary condition failed but no witness was found: " + nec.describe());
  }
  auto [shift, g] = factor_out_monomial(f);
  if (!shift.is_zero()) {
    DecomposeOutcome o = decompose_impl(g, opt, depth + 1);
    if (o.certificate) {
      auto info = o.certificate->info;
      o.certificate = shifted(*o.certificate, shift);
      o.certificate->info = info;
      o.certificate->info["monomial_factor"] = shift.to_string();
    }
    if (o.verdict == Verdict::not_psd && !(evaluate(f, *o.point) < 0)) return make_inconclusive("witness lost after factoring");
    return o;
  }
  auto gamma = gamma_terms(f);
  if (gamma.empty()) return make_sonc(squares_certificate(f), opt);

  bool all_negative = true;
  for (const auto& [b, d] : gamma) all_negative = all_negative && d > 0;
  if (!all_negative) {
    if (auto s = find_sign_assignment(f.nvars(), gamma)) {
      DecomposeOutcome o = decompose_impl(flip_signs(f, *s), opt, depth + 1);
      if (o.certificate) {
        auto info = o.certificate->info;
        o.certificate = sign_flipped(*o.certificate, *s);
        o.certificate->info = info;
      }
      if (o.point)
        for (std::size_t k = 0; k < f.nvars(); ++k)
          if (s->signs[k] < 0) (*o.point)[k] = -(*o.point)[k];
      return o;
    }
    // no sign assignment: work with every inner coefficient made negative
    SparsePoly relaxed(f.nvars());
    for (const auto& [e, c] : f.terms()) relaxed.add_term(e, (e.is_even() && c > 0) ? c : Rational(-abs(c)));
    DecomposeOutcome o = decompose_impl(relaxed, opt, depth + 1);
    if (o.verdict == Verdict::sonc) {
      SoncCertificate cert = *o.certificate;
      for (auto& c : cert.circuits)
        if (f.coeff(c.poly.beta()) > 0) c.poly = c.poly.with_d(-c.poly.d());
      cert.claimed_sum = f;
      cert.info["relaxed"] = "true";
      o.certificate = cert;
      return o;
    }
    if (o.verdict == Verdict::not_psd) {
      DecomposeOutcome r;
      r.verdict = Verdict::not_sonc;
      r.point = o.point;
      r.reason = "the polynomial with all inner coefficients made negative is not PSD";
      return r;
    }
    return make_inconclusive("no sign assignment; relaxed polynomial: " + o.reason);
  }

  const auto lambda = split_support(f).lambda_part;
  for (const auto& [b, d] : gamma) {
    auto loc = interior_classification(PointSet(lambda), b);
    if (loc.location == Location::boundary) return face_pipeline(f, loc.face, opt, depth);
    if (loc.location == Location::outside) return make_inconclusive("inner exponent outside the outer hull");
  }
  if (gamma.size() == 1) return single_pipeline(f, opt);
  return multi_pipeline(f, opt);
}

}  // namespace detail

inline DecomposeOutcome decompose(const SparsePoly& f, const DecomposeOptions& opt = {}) {
  try {
    return detail::decompose_impl(f, opt, 0);
  } catch (const NumericalFailure& e) {
    return detail::make_inconclusive(std::string("numerical failure: ") + e.what());
  }
}

}  // namespace sonc

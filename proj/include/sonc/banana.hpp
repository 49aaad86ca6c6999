#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sonc/certificate.hpp"
#include "sonc/decompose.hpp"
#include "sonc/mediated.hpp"

namespace sonc {

// sum outer - d x^beta; beta even forces d > 0.
struct BananaPoly {
  std::vector<Term> outer;
  Exponent beta;
  Rational d;

  SparsePoly to_poly(std::size_t nvars) const {
    SparsePoly p(nvars);
    for (const auto& t : outer) p.add_term(t.exponent, t.coeff);
    p.add_term(beta, -d);
    return p;
  }
};

// Bananas plus the positive even terms no banana needs.
struct BananaSplit {
  std::size_t nvars = 0;
  std::vector<BananaPoly> bananas;
  std::vector<Term> squares;

  SparsePoly sum() const {
    SparsePoly s(nvars);
    for (const auto& b : bananas) s += b.to_poly(nvars);
    for (const auto& t : squares) s.add_term(t.exponent, t.coeff);
    return s;
  }
};

namespace detail {

inline bool is_outer_term(const Exponent& e, const Rational& c) { return e.is_even() && c > 0; }

// The single non-outer term of a piece, if any.
inline std::optional<Exponent> inner_of(const SparsePoly& p) {
  std::optional<Exponent> in;
  for (const auto& [e, c] : p.terms()) {
    if (is_outer_term(e, c)) continue;
    if (in) throw PreconditionError("piece has two non-square terms");
    in = e;
  }
  return in;
}

// Makes every piece sign-consistent with the others at p. A piece X with
// -d x^p meets a piece Y with +c x^p: for c >= d, Y absorbs X; otherwise
// Y absorbs the fraction c/d of X.
inline void settle_point(std::vector<SparsePoly>& pieces, const Exponent& p) {
  if (!p.is_even()) return;
  for (;;) {
    std::optional<std::size_t> neg, pos;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const Rational c = pieces[i].coeff(p);
      if (c < 0 && !neg) neg = i;
      if (c > 0 && !pos) pos = i;
    }
    if (!neg || !pos) return;
    SparsePoly& x = pieces[*neg];
    SparsePoly& y = pieces[*pos];
    const Rational d = -x.coeff(p), c = y.coeff(p);
    if (c >= d) {
      y += x;
      pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(*neg));
    } else {
      const Rational t = c / d;
      y += x.scaled(t);
      x = x.scaled(1 - t);
    }
  }
}

}  // namespace detail

// Rewrites a sum of binomial squares as nonnegative bananas using only its own
// support, processing the squares in order and settling 2u, 2v, u+v each time.
inline BananaSplit banana_rewrite(const SbsCertificate& sbs) {
  const std::size_t n = sbs.nvars;
  std::vector<SparsePoly> pieces;
  for (const auto& q : sbs.squares) {
    SparsePoly s = q.expand(n);
    if (s.is_zero()) continue;
    pieces.push_back(s);
    detail::settle_point(pieces, q.u.scaled(2));
    detail::settle_point(pieces, q.v.scaled(2));
    detail::settle_point(pieces, q.u + q.v);
  }
  BananaSplit out;
  out.nvars = n;
  SparsePoly pure(n);
  std::map<Exponent, SparsePoly> by_inner;
  for (const auto& p : pieces) {
    auto in = detail::inner_of(p);
    if (!in) pure += p;
    else {
      auto [it, inserted] = by_inner.try_emplace(*in, n);
      it->second += p;
    }
  }
  for (const auto& [beta, p] : by_inner) {
    if (!p.contains(beta) || detail::is_outer_term(beta, p.coeff(beta))) {
      pure += p;
      continue;
    }
    BananaPoly b{{}, beta, -p.coeff(beta)};
    for (const auto& [e, c] : p.terms())
      if (e != beta) b.outer.push_back({c, e});
    out.bananas.push_back(std::move(b));
  }
  for (const auto& [e, c] : pure.terms()) {
    if (!detail::is_outer_term(e, c)) throw NumericalFailure("banana rewrite left a non-square free term");
    out.squares.push_back({c, e});
  }
  return out;
}

struct ResupportOptions {
  SbsOptions sbs;
  DecomposeOptions decompose;
  bool prune = true;
};

// Same-support certificate of f from any certificate of f.
inline SoncCertificate resupport(const SparsePoly& f, const SoncCertificate& cert, const ResupportOptions& opt = {}) {
  const std::size_t n = f.nvars();
  if (cert.nvars != n) throw PreconditionError("certificate and polynomial disagree on nvars");
  const auto k = static_cast<std::int64_t>(2 * n + 1);
  const SbsCertificate sbs = sbs_from_sonc(cert, k, opt.sbs);
  const BananaSplit split = banana_rewrite(sbs);

  SoncCertificate out;
  out.nvars = n;
  out.claimed_sum = f;
  out.mode = (cert.mode == CertMode::epsilon || sbs.mode == CertMode::epsilon) ? CertMode::epsilon : CertMode::exact;
  for (const auto& t : split.squares) out.monomial_squares.push_back({t.coeff, t.exponent.divided(k)});
  for (const auto& b : split.bananas) {
    // x -> x^(1/k) is a bijection for odd k, so the banana stays nonnegative
    SparsePoly g(n);
    for (const auto& t : b.outer) g.add_term(t.exponent.divided(k), t.coeff);
    g.add_term(b.beta.divided(k), -b.d);
    DecomposeOptions dopt = opt.decompose;
    dopt.prune = false;
    const DecomposeOutcome o = decompose(g, dopt);
    if (o.verdict != Verdict::sonc)
      throw NumericalFailure("banana " + g.to_string() + " was not decomposed: " + to_string(o.verdict) + " " + o.reason);
    if (o.certificate->mode == CertMode::epsilon) out.mode = CertMode::epsilon;
    for (const auto& c : o.certificate->circuits) out.circuits.push_back(c);
    for (const auto& t : o.certificate->monomial_squares) out.monomial_squares.push_back(t);
  }
  normalize_squares(out);
  for (const auto& c : out.circuits) {
    const SparsePoly cp = c.poly.to_poly();
    for (const auto& [e, v] : cp.terms())
      if (!f.contains(e)) throw NumericalFailure("resupported circuit uses " + e.to_string() + " outside supp(f)");
  }
  for (const auto& t : out.monomial_squares)
    if (!f.contains(t.exponent)) throw NumericalFailure("resupported square uses " + t.exponent.to_string() + " outside supp(f)");
  if (out.mode == CertMode::epsilon) {
    out.epsilon = std::max({opt.sbs.epsilon, cert.epsilon.value_or(0), sbs.epsilon.value_or(0)});
    const double res = relative_residual(out, f);
    if (res > *out.epsilon) throw NumericalFailure("resupported certificate residual exceeds epsilon", res);
  }
  if (opt.prune) out = prune_certificate(out);
  out.info["resupport_k"] = std::to_string(k);
  return out;
}

}  // namespace sonc

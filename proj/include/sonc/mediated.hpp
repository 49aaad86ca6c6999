#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sonc/certificate.hpp"
#include "sonc/circuit.hpp"
#include "sonc/error.hpp"
#include "sonc/linalg.hpp"
#include "sonc/polytope.hpp"

namespace sonc {

struct MediatedSet {
  Trellis trellis;
  std::vector<Exponent> members;  // graded order

  bool contains(const Exponent& e) const { return std::binary_search(members.begin(), members.end(), e, GradedOrder{}); }
};

struct MediatedOptions {
  std::size_t max_box_points = 4'000'000;  // lattice-box cap for the hull enumeration
  std::optional<std::uint64_t> deletion_seed;  // shuffles the deletion order
};

using ExponentSet = std::unordered_set<Exponent, ExponentHash>;

// All lattice points of conv(trellis), graded order.
inline std::vector<Exponent> lattice_points(const Trellis& t, std::size_t max_box_points = 4'000'000) {
  const auto& m = t.members();
  const std::size_t n = m.front().size();
  const auto coords = affine_coordinates(m);
  const std::size_t r = coords.size();
  if (r == 0) return {m.front()};
  // p = a0 + sum_i mu_i (a_i - a0); mu = inv * (p - a0) restricted to coords
  RationalMatrix sys(r, 2 * r);
  for (std::size_t row = 0; row < r; ++row) {
    for (std::size_t i = 0; i < r; ++i) sys(row, i) = Rational(static_cast<long>(m[i + 1][coords[row]] - m[0][coords[row]]));
    sys(row, r + row) = 1;
  }
  const RowEchelon e = rref(sys);
  std::vector<std::vector<Rational>> inv(r, std::vector<Rational>(r));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) inv[i][j] = e.reduced(i, r + j);

  std::vector<std::int64_t> lo(r), hi(r);
  long double box = 1;
  for (std::size_t k = 0; k < r; ++k) {
    lo[k] = hi[k] = m[0][coords[k]];
    for (const auto& a : m) {
      lo[k] = std::min(lo[k], a[coords[k]]);
      hi[k] = std::max(hi[k], a[coords[k]]);
    }
    box *= static_cast<long double>(hi[k] - lo[k] + 1);
  }
  if (box > static_cast<long double>(max_box_points))
    throw PreconditionError("lattice box of the trellis hull exceeds the configured cap");

  std::vector<Exponent> out;
  std::vector<std::int64_t> cur(lo);
  std::vector<Rational> diff(r), mu(r);
  for (;;) {
    for (std::size_t k = 0; k < r; ++k) diff[k] = Rational(static_cast<long>(cur[k] - m[0][coords[k]]));
    Rational total(0);
    bool ok = true;
    for (std::size_t i = 0; i < r && ok; ++i) {
      mu[i] = 0;
      for (std::size_t j = 0; j < r; ++j)
        if (inv[i][j] != 0 && diff[j] != 0) mu[i] += inv[i][j] * diff[j];
      ok = mu[i] >= 0;
      total += mu[i];
    }
    if (ok && total <= 1) {
      std::vector<std::int64_t> p(n);
      for (std::size_t k = 0; k < n && ok; ++k) {
        Rational v(static_cast<long>(m[0][k]));
        for (std::size_t i = 0; i < r; ++i) v += mu[i] * Rational(static_cast<long>(m[i + 1][k] - m[0][k]));
        if (v.get_den() != 1) ok = false;
        else p[k] = v.get_num().get_si();
      }
      if (ok) out.emplace_back(std::move(p));
    }
    std::size_t k = 0;
    while (k < r && cur[k] == hi[k]) {
      cur[k] = lo[k];
      ++k;
    }
    if (k == r) break;
    ++cur[k];
  }
  std::sort(out.begin(), out.end(), GradedOrder{});
  return out;
}

namespace detail {

// Is p the average of two distinct even points of s?
inline bool mediated_in(const Exponent& p, const ExponentSet& s, const std::vector<Exponent>& evens) {
  const Exponent twice = p.scaled(2);
  for (const auto& e : evens) {
    if (e == p) continue;
    bool fits = true;
    for (std::size_t k = 0; k < p.size() && fits; ++k) fits = e[k] <= twice[k];
    if (fits && s.count(twice.minus(e))) return true;
  }
  return false;
}

}  // namespace detail

// Greatest set M with A ⊆ M ⊆ avg(M) ∪ A inside the hull, by repeated deletion.
inline MediatedSet maximal_mediated_set(const Trellis& t, const MediatedOptions& opt = {}) {
  std::vector<Exponent> pts = lattice_points(t, opt.max_box_points);
  const ExponentSet fixed(t.members().begin(), t.members().end());
  ExponentSet alive(pts.begin(), pts.end());
  std::vector<Exponent> order;
  for (const auto& p : pts)
    if (!fixed.count(p)) order.push_back(p);
  if (opt.deletion_seed) {
    std::mt19937_64 rng(*opt.deletion_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<Exponent> evens;
    for (const auto& p : pts)
      if (alive.count(p) && p.is_even()) evens.push_back(p);
    for (const auto& p : order) {
      if (!alive.count(p) || detail::mediated_in(p, alive, evens)) continue;
      alive.erase(p);
      if (p.is_even()) evens.erase(std::find(evens.begin(), evens.end(), p));
      changed = true;
    }
  }
  MediatedSet ms{t, {}};
  for (const auto& p : pts)
    if (alive.count(p)) ms.members.push_back(p);
  return ms;
}

inline bool is_h_trellis(const Trellis& t, const MediatedOptions& opt = {}) {
  return maximal_mediated_set(t, opt).members.size() == lattice_points(t, opt.max_box_points).size();
}

// Checks A ⊆ M ⊆ avg(M) ∪ A and M ⊆ conv(A).
inline bool is_mediated(const Trellis& t, const std::vector<Exponent>& members) {
  const ExponentSet s(members.begin(), members.end());
  for (const auto& a : t.members())
    if (!s.count(a)) return false;
  const auto hull = lattice_points(t);
  const ExponentSet in_hull(hull.begin(), hull.end());
  std::vector<Exponent> evens;
  for (const auto& p : members)
    if (p.is_even()) evens.push_back(p);
  const ExponentSet fixed(t.members().begin(), t.members().end());
  for (const auto& p : members) {
    if (!in_hull.count(p)) return false;
    if (!fixed.count(p) && !detail::mediated_in(p, s, evens)) return false;
  }
  return true;
}

namespace detail {

// Widest pair (s, t), s < t, of even members with s + t = 2p.
inline std::pair<Exponent, Exponent> widest_pair(const Exponent& p, const ExponentSet& s, const std::vector<Exponent>& evens) {
  const Exponent twice = p.scaled(2);
  std::optional<std::pair<Exponent, Exponent>> best;
  std::int64_t best_w = -1;
  for (const auto& e : evens) {
    if (!(e < p)) continue;
    bool fits = true;
    for (std::size_t k = 0; k < p.size() && fits; ++k) fits = e[k] <= twice[k];
    if (!fits) continue;
    Exponent o = twice.minus(e);
    if (!s.count(o)) continue;
    std::int64_t w = 0;
    for (std::size_t k = 0; k < p.size(); ++k) w += (o[k] - e[k]) * (o[k] - e[k]);
    if (w > best_w) {
      best_w = w;
      best = std::make_pair(e, o);
    }
  }
  if (!best) throw PreconditionError("point " + p.to_string() + " is not mediated");
  return *best;
}

// Solves (I - Q^T) w = e_0 where each state i sends half its mass to each listed successor.
inline std::vector<Rational> visit_counts(const std::vector<std::pair<long, long>>& succ) {
  const std::size_t n = succ.size();
  std::vector<std::map<std::size_t, Rational>> rows(n);
  const Rational half = make_rational(1, 2);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i][i] += 1;
    for (long s : {succ[i].first, succ[i].second})
      if (s >= 0) rows[static_cast<std::size_t>(s)][i] -= half;
  }
  std::vector<Rational> rhs(n);
  rhs[0] = 1;
  // sparse Gaussian elimination, pivoting on the diagonal
  for (std::size_t k = 0; k < n; ++k) {
    auto it = rows[k].find(k);
    if (it == rows[k].end() || it->second == 0) throw NumericalFailure("singular visit-count system");
    const Rational piv = it->second;
    for (std::size_t i = k + 1; i < n; ++i) {
      auto f = rows[i].find(k);
      if (f == rows[i].end()) continue;
      const Rational factor = f->second / piv;
      for (const auto& [j, v] : rows[k]) {
        Rational& dst = rows[i][j];
        dst -= factor * v;
        if (dst == 0) rows[i].erase(j);
      }
      rhs[i] -= factor * rhs[k];
    }
  }
  std::vector<Rational> w(n);
  for (std::size_t k = n; k-- > 0;) {
    Rational s = rhs[k];
    for (const auto& [j, v] : rows[k])
      if (j > k) s -= v * w[j];
    w[k] = s / rows[k].at(k);
  }
  return w;
}

inline Rational monomial_at(const std::vector<Rational>& r, const Exponent& e) {
  Rational v(1);
  for (std::size_t k = 0; k < e.size(); ++k) v *= pow(r[k], static_cast<unsigned long>(e[k]));
  return v;
}

}  // namespace detail

struct SbsOptions {
  double epsilon = 1e-8;
  MediatedOptions mediated;
};

// Sum of binomial squares for a nonnegative circuit whose inner exponent lies in M.
inline SbsCertificate sbs_decompose_circuit(const CircuitPoly& c0, const MediatedSet& ms, const SbsOptions& opt = {}) {
  const CircuitPoly c = c0.validated() ? c0 : CircuitPoly::make(c0.outer(), c0.beta(), c0.d());
  if (!is_nonnegative_circuit(c)) throw PreconditionError("circuit is not nonnegative");
  if (!ms.contains(c.beta())) throw PreconditionError("inner exponent " + c.beta().to_string() + " is not in the mediated set");
  const std::size_t n = c.nvars();
  SbsCertificate out;
  out.nvars = n;
  out.claimed_sum = c.to_poly();
  auto square_of = [&](const Rational& w, const Exponent& e) {
    out.squares.push_back({w, Rational(1), e.divided(2), Rational(0), e.divided(2)});
  };
  if (c.d() == 0 || (c.beta().is_even() && c.d() < 0)) {
    for (const auto& t : c.outer()) square_of(t.coeff, t.exponent);
    if (c.d() != 0) square_of(-c.d(), c.beta());
    return out;
  }
  // x_k -> -x_k on an odd coordinate of beta makes the inner coefficient positive
  std::optional<std::size_t> flip;
  Rational d = c.d();
  if (d < 0) {
    for (std::size_t k = 0; k < n && !flip; ++k)
      if (c.beta()[k] % 2 != 0) flip = k;
    d = -d;
  }
  const CircuitPoly cpos = c.with_d(d);

  // y = x / r with r near the circuit zero; then c(r y) = D (sum lambda_i y^a_i - y^b) + leftovers
  const auto zero = circuit_zero(cpos);
  std::vector<Rational> r(n);
  for (std::size_t k = 0; k < n; ++k) r[k] = rationalize(zero[k]);
  const auto& lam = c.lambdas();
  Rational big_k;
  for (std::size_t i = 0; i < c.outer().size(); ++i) {
    Rational v = c.outer()[i].coeff * detail::monomial_at(r, c.outer()[i].exponent) / lam[i];
    if (i == 0 || v < big_k) big_k = v;
  }
  Rational big_d = d * detail::monomial_at(r, c.beta());
  if (big_d > big_k) {
    big_d = big_k;
    out.mode = CertMode::epsilon;
    out.epsilon = opt.epsilon;
  }

  // random walk from beta over M \ A with absorbing trellis points
  const ExponentSet mem(ms.members.begin(), ms.members.end());
  const auto trellis_pts = c.members();
  const ExponentSet fixed(trellis_pts.begin(), trellis_pts.end());
  std::vector<Exponent> evens;
  for (const auto& p : ms.members)
    if (p.is_even()) evens.push_back(p);
  std::vector<Exponent> states{c.beta()};
  std::unordered_map<Exponent, long, ExponentHash> index{{c.beta(), 0}};
  std::vector<std::pair<Exponent, Exponent>> pairs;
  std::vector<std::pair<long, long>> succ;
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto pr = detail::widest_pair(states[i], mem, evens);
    auto id = [&](const Exponent& e) -> long {
      if (fixed.count(e)) return -1;
      auto [it, inserted] = index.try_emplace(e, static_cast<long>(states.size()));
      if (inserted) states.push_back(e);
      return it->second;
    };
    long a = id(pr.first), b = id(pr.second);
    pairs.push_back(pr);
    succ.emplace_back(a, b);
  }
  const auto w = detail::visit_counts(succ);

  const Rational half = make_rational(1, 2);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (w[i] == 0) continue;
    const Exponent u = pairs[i].first.divided(2), v = pairs[i].second.divided(2);
    Rational a = 1 / detail::monomial_at(r, u), b = 1 / detail::monomial_at(r, v);
    if (flip && (u[*flip] + v[*flip]) % 2 != 0) b = -b;
    out.squares.push_back({big_d * w[i] * half, a, u, b, v});
  }
  for (std::size_t i = 0; i < c.outer().size(); ++i) {
    const auto& t = c.outer()[i];
    Rational left = t.coeff - big_d * lam[i] / detail::monomial_at(r, t.exponent);
    if (left < 0) throw NumericalFailure("negative leftover in binomial-square construction");
    if (left != 0) square_of(left, t.exponent);
  }
  if (out.mode == CertMode::epsilon) {
    const SparsePoly res = out.expanded() - out.claimed_sum;
    const double rel = max_abs_coeff(res) / std::max(max_abs_coeff(out.claimed_sum), 1e-300);
    if (rel > opt.epsilon) throw NumericalFailure("binomial-square residual exceeds epsilon", rel);
  }
  return out;
}

// Substitutes x -> x^k in every circuit and writes each as binomial squares.
inline SbsCertificate sbs_from_sonc(const SoncCertificate& cert, std::int64_t k, const SbsOptions& opt = {}) {
  if (k < static_cast<std::int64_t>(cert.nvars) || k < 1) throw PreconditionError("power substitution needs k >= nvars");
  SbsCertificate out;
  out.nvars = cert.nvars;
  out.claimed_sum = substitute_powers(cert.recomposed(), k);
  if (cert.mode == CertMode::epsilon) {
    out.mode = CertMode::epsilon;
    out.epsilon = cert.epsilon.value_or(opt.epsilon);
  }
  std::map<std::vector<Exponent>, MediatedSet> cache;
  for (const auto& cc : cert.circuits) {
    std::vector<Term> outer;
    for (const auto& t : cc.poly.outer()) outer.push_back({t.coeff, t.exponent.scaled(k)});
    const CircuitPoly sub = CircuitPoly::make(outer, cc.poly.beta().scaled(k), cc.poly.d());
    auto key = sub.members();
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, maximal_mediated_set(Trellis::make(key), opt.mediated)).first;
    SbsCertificate part = sbs_decompose_circuit(sub, it->second, opt);
    if (part.mode == CertMode::epsilon) {
      out.mode = CertMode::epsilon;
      out.epsilon = std::max(out.epsilon.value_or(0), part.epsilon.value_or(opt.epsilon));
    }
    for (auto& q : part.squares) out.squares.push_back(std::move(q));
  }
  for (const auto& t : cert.monomial_squares) {
    const Exponent u = t.exponent.scaled(k).divided(2);
    out.squares.push_back({t.coeff, Rational(1), u, Rational(0), u});
  }
  return out;
}

}  // namespace sonc

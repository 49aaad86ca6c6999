#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "sonc/poly.hpp"
#include "sonc/polytope.hpp"

namespace sonc {

enum class NecessaryClause { none, vertex_not_even, vertex_coefficient_not_positive };

struct NecessaryReport {
  bool pass = true;
  NecessaryClause clause = NecessaryClause::none;
  std::optional<Exponent> vertex;

  std::string describe() const {
    if (pass) return "pass";
    std::string v = vertex ? vertex->to_string() : "?";
    if (clause == NecessaryClause::vertex_not_even) return "vertex " + v + " is not even";
    return "vertex " + v + " has a non-positive coefficient";
  }
};

// Every vertex of New(f) must be even with a positive coefficient.
inline NecessaryReport necessary_conditions(const SparsePoly& f) {
  NecessaryReport r;
  if (f.is_zero()) return r;
  for (const auto& v : hull_vertices(PointSet(f.support()))) {
    if (!v.is_even()) {
      r.pass = false;
      r.clause = NecessaryClause::vertex_not_even;
      r.vertex = v;
      return r;
    }
    if (f.coeff(v) <= 0) {
      r.pass = false;
      r.clause = NecessaryClause::vertex_coefficient_not_positive;
      r.vertex = v;
      return r;
    }
  }
  return r;
}

// Given a face of New(f) (as exponents) and a point p with f|face(p) < 0 and
// no zero coordinates, pushes p along the face's normal until f itself is negative.
inline std::optional<std::vector<Rational>> lift_face_witness(const SparsePoly& f, const std::vector<Exponent>& face,
                                                              const std::vector<Rational>& p) {
  const auto supp = f.support();
  std::vector<bool> on_face(supp.size(), false);
  for (std::size_t i = 0; i < supp.size(); ++i)
    on_face[i] = std::find(face.begin(), face.end(), supp[i]) != face.end();
  const auto w = supporting_functional(supp, on_face);
  for (unsigned long k = 0; k <= 4096; k = k ? 2 * k : 1) {
    Rational t = pow(Rational(2), k);
    std::vector<Rational> x(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) x[i] = p[i] * pow(t, static_cast<long>(w[i].get_si()));
    if (evaluate(f, x) < 0) return x;
  }
  return std::nullopt;
}

// A point where f is negative when the necessary conditions fail.
inline std::optional<std::vector<Rational>> necessary_witness(const SparsePoly& f, const NecessaryReport& r) {
  if (r.pass || !r.vertex) return std::nullopt;
  const Exponent& v = *r.vertex;
  std::vector<Rational> p(f.nvars(), Rational(1));
  if (f.coeff(v) > 0) {
    // odd vertex: flip one odd coordinate
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] % 2 != 0) {
        p[i] = -1;
        break;
      }
  }
  return lift_face_witness(f, {v}, p);
}

}  // namespace sonc

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sonc/error.hpp"
#include "sonc/exponent.hpp"
#include "sonc/linalg.hpp"
#include "sonc/lp.hpp"
#include "sonc/rational.hpp"

namespace sonc {

using RationalPoint = std::vector<Rational>;

inline RationalPoint to_point(const Exponent& e) {
  RationalPoint p(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) p[i] = Rational(static_cast<long>(e[i]));
  return p;
}

class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::vector<Exponent> pts) : pts_(std::move(pts)) {
    std::set<Exponent> seen;
    for (const auto& p : pts_) {
      if (p.size() != pts_.front().size()) throw PreconditionError("points of unequal dimension");
      if (!seen.insert(p).second) throw PreconditionError("duplicate point " + p.to_string());
    }
  }
  std::size_t size() const noexcept { return pts_.size(); }
  bool empty() const noexcept { return pts_.empty(); }
  const Exponent& operator[](std::size_t i) const { return pts_[i]; }
  const std::vector<Exponent>& points() const noexcept { return pts_; }
  std::size_t ambient_dimension() const { return pts_.empty() ? 0 : pts_.front().size(); }

 private:
  std::vector<Exponent> pts_;
};

namespace detail {

inline RationalMatrix difference_matrix(std::span<const Exponent> pts) {
  const std::size_t n = pts.empty() ? 0 : pts[0].size();
  RationalMatrix d(pts.empty() ? 0 : pts.size() - 1, n);
  for (std::size_t i = 1; i < pts.size(); ++i)
    for (std::size_t k = 0; k < n; ++k) d(i - 1, k) = Rational(static_cast<long>(pts[i][k] - pts[0][k]));
  return d;
}

}  // namespace detail

// Coordinates on which the projection of aff(pts) is injective.
inline std::vector<std::size_t> affine_coordinates(std::span<const Exponent> pts) {
  if (pts.size() < 2) return {};
  return rref(detail::difference_matrix(pts)).pivot_cols;
}

inline std::size_t affine_rank(std::span<const Exponent> pts) {
  if (pts.size() < 2) return 0;
  return rank(detail::difference_matrix(pts));
}

inline bool affinely_independent(std::span<const Exponent> pts) {
  return !pts.empty() && affine_rank(pts) == pts.size() - 1;
}

inline std::size_t affine_dimension(const PointSet& a) {
  if (a.empty()) throw PreconditionError("affine dimension of an empty set");
  return affine_rank(a.points());
}

class Trellis {
 public:
  Trellis() = default;
  static Trellis make(std::vector<Exponent> members) {
    if (members.empty()) throw PreconditionError("empty trellis");
    for (const auto& m : members) {
      if (!m.is_even()) throw PreconditionError("trellis point " + m.to_string() + " is not even");
      if (m.size() != members.front().size()) throw PreconditionError("trellis points of unequal dimension");
    }
    if (!affinely_independent(members)) throw PreconditionError("trellis points are affinely dependent");
    Trellis t;
    t.members_ = std::move(members);
    return t;
  }
  const std::vector<Exponent>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  const Exponent& operator[](std::size_t i) const { return members_[i]; }
  friend bool operator==(const Trellis&, const Trellis&) = default;

 private:
  std::vector<Exponent> members_;
};

struct BarycentricCoords {
  Trellis trellis;
  Exponent target;
  std::vector<Rational> lambdas;  // aligned with trellis members
};

enum class Location { interior, boundary, outside };

inline const char* to_string(Location l) {
  switch (l) {
    case Location::interior: return "interior";
    case Location::boundary: return "boundary";
    default: return "outside";
  }
}

struct BarycentricResult {
  Location location = Location::outside;
  std::vector<Rational> lambdas;  // empty when outside
  std::vector<Exponent> face;     // members with positive weight, for boundary results
};

// Affine coefficients of target in terms of affinely independent members.
inline std::optional<std::vector<Rational>> affine_coefficients(std::span<const Exponent> members,
                                                                 const RationalPoint& target) {
  const std::size_t n = target.size(), k = members.size();
  RationalMatrix a(n + 1, k);
  std::vector<Rational> b(n + 1);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) a(i, j) = Rational(static_cast<long>(members[j][i]));
    a(n, j) = 1;
  }
  for (std::size_t i = 0; i < n; ++i) b[i] = target[i];
  b[n] = 1;
  return solve_any(a, b);
}

inline BarycentricResult barycentric(const Trellis& t, const Exponent& beta) {
  BarycentricResult r;
  auto lam = affine_coefficients(t.members(), to_point(beta));
  if (!lam) return r;
  for (const auto& l : *lam)
    if (l < 0) return r;
  r.lambdas = std::move(*lam);
  bool all_positive = true;
  for (std::size_t i = 0; i < r.lambdas.size(); ++i) {
    if (r.lambdas[i] > 0) r.face.push_back(t[i]);
    else all_positive = false;
  }
  r.location = all_positive ? Location::interior : Location::boundary;
  if (all_positive) r.face.clear();
  return r;
}

inline bool in_convex_hull(std::span<const Exponent> pts, const RationalPoint& p) {
  if (pts.empty()) return false;
  const std::size_t n = p.size(), m = pts.size();
  RationalMatrix a(n + 1, m);
  std::vector<Rational> b(n + 1);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) a(i, j) = Rational(static_cast<long>(pts[j][i]));
    a(n, j) = 1;
  }
  for (std::size_t i = 0; i < n; ++i) b[i] = p[i];
  b[n] = 1;
  auto res = nonneg_solve(LinearSystem(std::move(a), std::move(b)));
  if (res.status == LpStatus::pivot_limit) throw NumericalFailure("pivot limit in hull membership");
  return res.feasible();
}

namespace detail {

// Whether some convex representation of p over pts gives pts[k] positive weight.
inline bool can_carry_weight(std::span<const Exponent> pts, const RationalPoint& p, std::size_t k) {
  const std::size_t n = p.size(), m = pts.size();
  RationalMatrix a(n + 2, m + 1);
  std::vector<Rational> b(n + 2);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) a(i, j) = Rational(static_cast<long>(pts[j][i]));
    a(n, j) = 1;
  }
  for (std::size_t i = 0; i < n; ++i) a(i, m) = -p[i];
  a(n, m) = -1;
  a(n + 1, k) = 1;
  b[n + 1] = 1;
  auto res = nonneg_solve(LinearSystem(std::move(a), std::move(b)));
  if (res.status == LpStatus::pivot_limit) throw NumericalFailure("pivot limit in face computation");
  return res.feasible();
}

}  // namespace detail

// Indices of the points lying on the smallest face of conv(pts) that contains p,
// or nullopt when p is outside.
inline std::optional<std::vector<std::size_t>> minimal_face(std::span<const Exponent> pts, const RationalPoint& p) {
  if (!in_convex_hull(pts, p)) return std::nullopt;
  std::vector<std::size_t> face;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (to_point(pts[k]) == p || detail::can_carry_weight(pts, p, k)) face.push_back(k);
  }
  return face;
}

inline std::vector<Exponent> hull_vertices(const PointSet& a) {
  if (a.empty()) throw PreconditionError("hull of an empty set");
  std::vector<Exponent> out;
  for (std::size_t k = 0; k < a.size(); ++k) {
    std::vector<Exponent> others;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (j != k) others.push_back(a[j]);
    if (!in_convex_hull(others, to_point(a[k]))) out.push_back(a[k]);
  }
  return out;
}

struct FaceLocation {
  Location location = Location::outside;
  std::vector<Exponent> face;  // members of the minimal face, for boundary results
};

inline FaceLocation locate(const PointSet& a, const RationalPoint& p) {
  FaceLocation r;
  auto face = minimal_face(a.points(), p);
  if (!face) return r;
  if (face->size() == a.size()) {
    r.location = Location::interior;
    return r;
  }
  r.location = Location::boundary;
  for (auto k : *face) r.face.push_back(a[k]);
  return r;
}

inline FaceLocation interior_classification(const PointSet& a, const Exponent& beta) {
  return locate(a, to_point(beta));
}

// All affinely independent subsets of A_even with beta in the relative
// interior of their hull, ordered by size and then by graded order of members.
inline std::vector<BarycentricCoords> enumerate_circuits(const PointSet& a_even, const Exponent& beta) {
  std::vector<Exponent> pts = a_even.points();
  for (const auto& p : pts)
    if (!p.is_even()) throw PreconditionError("enumerate_circuits needs even points, got " + p.to_string());
  std::sort(pts.begin(), pts.end(), GradedOrder{});
  const RationalPoint target = to_point(beta);
  const std::size_t max_size = std::min(pts.size(), beta.size() + 1);
  std::vector<std::vector<BarycentricCoords>> by_size(max_size + 1);
  std::vector<std::size_t> chosen;
  std::vector<Exponent> members;

  auto visit = [&](auto&& self, std::size_t start) -> void {
    if (!members.empty()) {
      auto lam = affine_coefficients(members, target);
      if (lam && std::all_of(lam->begin(), lam->end(), [](const Rational& l) { return l > 0; }))
        by_size[members.size()].push_back({Trellis::make(members), beta, std::move(*lam)});
    }
    if (members.size() == max_size) return;
    for (std::size_t i = start; i < pts.size(); ++i) {
      members.push_back(pts[i]);
      if (affinely_independent(members)) self(self, i + 1);
      members.pop_back();
    }
  };
  visit(visit, 0);

  std::vector<BarycentricCoords> out;
  for (auto& group : by_size)
    for (auto& c : group) out.push_back(std::move(c));
  return out;
}

namespace detail {

// Integer coordinates of pts - base restricted to the selected coordinates.
inline std::vector<Integer> projected(const Exponent& p, const Exponent& base, const std::vector<std::size_t>& coords) {
  std::vector<Integer> v(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) v[i] = Integer(static_cast<long>(p[coords[i]] - base[coords[i]]));
  return v;
}

}  // namespace detail

// For every hyperplane of aff(A) through affinely independent points of A,
// all betas must share one strict side or all lie on it.
inline bool same_side_check(const PointSet& a_even, const std::vector<Exponent>& betas) {
  if (a_even.empty()) throw PreconditionError("same-side check on an empty set");
  const auto& pts = a_even.points();
  const std::size_t d = affine_rank(pts);
  for (const auto& b : betas) {
    std::vector<Exponent> ext = pts;
    ext.push_back(b);
    if (affine_rank(ext) != d)
      throw PreconditionError("point " + b.to_string() + " is outside the affine hull of the support");
  }
  if (betas.size() <= 1 || d == 0) return true;
  const auto coords = affine_coordinates(pts);
  const Exponent& base = pts[0];
  std::vector<std::vector<Integer>> q;
  for (const auto& p : pts) q.push_back(detail::projected(p, base, coords));
  std::vector<std::vector<Integer>> bq;
  for (const auto& b : betas) bq.push_back(detail::projected(b, base, coords));

  std::vector<std::size_t> idx;
  bool ok = true;
  auto check_subset = [&]() {
    // normal vector of the hyperplane through q[idx[0..d-1]] by cofactors
    std::vector<std::vector<Integer>> rows;
    for (std::size_t r = 1; r < d; ++r) {
      std::vector<Integer> v(d);
      for (std::size_t k = 0; k < d; ++k) v[k] = q[idx[r]][k] - q[idx[0]][k];
      rows.push_back(std::move(v));
    }
    std::vector<Integer> normal(d);
    bool nonzero = false;
    for (std::size_t k = 0; k < d; ++k) {
      std::vector<Integer> minor;
      for (const auto& row : rows)
        for (std::size_t c = 0; c < d; ++c)
          if (c != k) minor.push_back(row[c]);
      Integer det = integer_determinant(std::move(minor), d - 1);
      normal[k] = ((k + d - 1) % 2 == 0) ? det : Integer(-det);
      if (normal[k] != 0) nonzero = true;
    }
    if (!nonzero) return;
    int first = 2;
    for (const auto& b : bq) {
      Integer h = 0;
      for (std::size_t k = 0; k < d; ++k) h += normal[k] * (b[k] - q[idx[0]][k]);
      int s = sgn(h);
      if (first == 2) first = s;
      else if (s != first) {
        ok = false;
        return;
      }
    }
  };
  auto visit = [&](auto&& self, std::size_t start) -> void {
    if (!ok) return;
    if (idx.size() == d) {
      check_subset();
      return;
    }
    for (std::size_t i = start; i < q.size() && ok; ++i) {
      idx.push_back(i);
      self(self, i + 1);
      idx.pop_back();
    }
  };
  visit(visit, 0);
  return ok;
}

// Edges of conv(vertices) as index pairs; vertices must be the hull's vertex set.
inline std::vector<std::pair<std::size_t, std::size_t>> hull_edges(const std::vector<Exponent>& vertices) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      RationalPoint mid(vertices[i].size());
      for (std::size_t k = 0; k < mid.size(); ++k)
        mid[k] = Rational(static_cast<long>(vertices[i][k] + vertices[j][k]), 2);
      bool edge = true;
      for (std::size_t k = 0; k < vertices.size() && edge; ++k) {
        if (k == i || k == j) continue;
        if (detail::can_carry_weight(vertices, mid, k)) edge = false;
      }
      if (edge) edges.emplace_back(i, j);
    }
  }
  return edges;
}

inline bool simple_vertex_check(const PointSet& a) {
  if (a.empty()) throw PreconditionError("simple-vertex check on an empty set");
  const auto verts = hull_vertices(a);
  const std::size_t d = affine_dimension(a);
  std::vector<std::size_t> degree(verts.size(), 0);
  for (auto [i, j] : hull_edges(verts)) {
    ++degree[i];
    ++degree[j];
  }
  return std::any_of(degree.begin(), degree.end(), [d](std::size_t k) { return k == d; });
}

// Integer w with <w,a> equal on the face points and <w,b> at least one
// smaller on every other point. Requires that the marked points form a face.
inline std::vector<Integer> supporting_functional(std::span<const Exponent> pts, const std::vector<bool>& on_face) {
  const std::size_t n = pts.empty() ? 0 : pts[0].size(), m = pts.size();
  std::size_t off = 0;
  for (bool f : on_face) off += f ? 0 : 1;
  const std::size_t cols = 2 * n + 2 + off;
  RationalMatrix a(m, cols);
  std::vector<Rational> b(m);
  std::size_t slack = 2 * n + 2;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t k = 0; k < n; ++k) {
      a(r, k) = Rational(static_cast<long>(pts[r][k]));
      a(r, n + k) = Rational(static_cast<long>(-pts[r][k]));
    }
    a(r, 2 * n) = -1;
    a(r, 2 * n + 1) = 1;
    if (!on_face[r]) {
      a(r, slack++) = 1;
      b[r] = -1;
    }
  }
  auto res = nonneg_solve(LinearSystem(std::move(a), std::move(b)));
  if (!res.feasible()) throw PreconditionError("marked points do not form a face");
  std::vector<Rational> w(n);
  Integer den = 1;
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = res.solution[k] - res.solution[n + k];
    den = lcm(den, w[k].get_den());
  }
  std::vector<Integer> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Rational s = w[k] * den;
    out[k] = s.get_num();
  }
  return out;
}

}  // namespace sonc

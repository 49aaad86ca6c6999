#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sonc/error.hpp"
#include "sonc/rational.hpp"

namespace sonc {

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols) {}
  RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
    r_ = rows.size();
    c_ = r_ ? rows.begin()->size() : 0;
    a_.reserve(r_ * c_);
    for (const auto& row : rows) {
      if (row.size() != c_) throw PreconditionError("ragged matrix literal");
      for (const auto& v : row) a_.push_back(v);
    }
  }

  std::size_t rows() const noexcept { return r_; }
  std::size_t cols() const noexcept { return c_; }
  Rational& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

  std::vector<Rational> column(std::size_t j) const {
    std::vector<Rational> v(r_);
    for (std::size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  std::vector<Rational> multiply(std::span<const Rational> x) const {
    if (x.size() != c_) throw PreconditionError("matrix-vector size mismatch");
    std::vector<Rational> y(r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j)
        if (sgn((*this)(i, j)) != 0 && sgn(x[j]) != 0) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  RationalMatrix transpose() const {
    RationalMatrix t(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<Rational> a_;
};

struct RowEchelon {
  RationalMatrix reduced;
  std::vector<std::size_t> pivot_cols;
};

// Reduced row echelon form by exact Gauss-Jordan elimination.
inline RowEchelon rref(RationalMatrix m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t p = row;
    while (p < m.rows() && m(p, col) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    Rational inv = 1 / m(row, col);
    for (std::size_t j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == 0) continue;
      Rational f = m(i, col);
      for (std::size_t j = col; j < m.cols(); ++j)
        if (m(row, j) != 0) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return {std::move(m), std::move(pivots)};
}

inline std::size_t rank(const RationalMatrix& m) { return rref(m).pivot_cols.size(); }

// Some solution of A x = b, or nullopt when inconsistent.
inline std::optional<std::vector<Rational>> solve_any(const RationalMatrix& a, std::span<const Rational> b) {
  if (b.size() != a.rows()) throw PreconditionError("rhs size mismatch");
  RationalMatrix aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  RowEchelon e = rref(std::move(aug));
  if (!e.pivot_cols.empty() && e.pivot_cols.back() == a.cols()) return std::nullopt;
  std::vector<Rational> x(a.cols());
  for (std::size_t r = 0; r < e.pivot_cols.size(); ++r) x[e.pivot_cols[r]] = e.reduced(r, a.cols());
  return x;
}

// Orthogonal projection of b onto the column space of A, exact.
inline std::vector<Rational> project_onto_column_space(const RationalMatrix& a, std::span<const Rational> b) {
  if (b.size() != a.rows()) throw PreconditionError("rhs size mismatch");
  std::vector<std::size_t> basis = rref(a).pivot_cols;
  const std::size_t m = a.rows(), p = basis.size();
  std::vector<Rational> out(m);
  if (p == 0) return out;
  RationalMatrix gram(p, p);
  std::vector<Rational> rhs(p);
  for (std::size_t u = 0; u < p; ++u) {
    for (std::size_t v = u; v < p; ++v) {
      Rational s(0);
      for (std::size_t i = 0; i < m; ++i) s += a(i, basis[u]) * a(i, basis[v]);
      gram(u, v) = s;
      gram(v, u) = s;
    }
    for (std::size_t i = 0; i < m; ++i) rhs[u] += a(i, basis[u]) * b[i];
  }
  auto y = solve_any(gram, rhs);
  if (!y) throw NumericalFailure("singular Gram matrix in projection");
  for (std::size_t u = 0; u < p; ++u)
    for (std::size_t i = 0; i < m; ++i) out[i] += a(i, basis[u]) * (*y)[u];
  return out;
}

inline Rational determinant(RationalMatrix m) {
  if (m.rows() != m.cols()) throw PreconditionError("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  Rational det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c) == 0) ++p;
    if (p == n) return Rational(0);
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m(i, c) == 0) continue;
      Rational f = m(i, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

// Integer determinant (row-major n x n) via fraction-free Bareiss.
inline Integer integer_determinant(std::vector<Integer> m, std::size_t n) {
  if (n == 0) return Integer(1);
  if (m.size() != n * n) throw PreconditionError("determinant size mismatch");
  int sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k * n + k] == 0) {
      std::size_t p = k + 1;
      while (p < n && m[p * n + k] == 0) ++p;
      if (p == n) return Integer(0);
      for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[p * n + j]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        m[i * n + j] = v;
      }
    }
    prev = m[k * n + k];
  }
  Integer det = m[(n - 1) * n + (n - 1)];
  return sign < 0 ? Integer(-det) : det;
}

}  // namespace sonc

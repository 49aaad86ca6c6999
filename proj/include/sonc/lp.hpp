#pragma once

#include <cstddef>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "sonc/error.hpp"
#include "sonc/linalg.hpp"
#include "sonc/rational.hpp"

namespace sonc {

struct LinearSystem {
  RationalMatrix matrix;
  std::vector<Rational> rhs;

  LinearSystem() = default;
  LinearSystem(RationalMatrix a, std::vector<Rational> b) : matrix(std::move(a)), rhs(std::move(b)) {
    if (rhs.size() != matrix.rows()) throw PreconditionError("linear system dimension mismatch");
  }
  std::size_t rows() const noexcept { return matrix.rows(); }
  std::size_t cols() const noexcept { return matrix.cols(); }
  friend bool operator==(const LinearSystem&, const LinearSystem&) = default;
};

enum class LpStatus { feasible, infeasible, pivot_limit };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::vector<Rational> solution;  // feasible point, or the phase-I minimiser when infeasible
  Rational phase_one_value;        // optimum of the artificial objective
  std::vector<Rational> farkas;    // y with y^T A <= 0, y^T b > 0 when infeasible
  std::size_t pivots = 0;

  bool feasible() const noexcept { return status == LpStatus::feasible; }
};

inline std::size_t default_pivot_limit() {
  if (const char* env = std::getenv("SONC_LP_PIVOT_LIMIT")) {
    try {
      long long v = std::stoll(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 200000;
}

// Phase-I rational simplex with Bland's rule. Returns a basic feasible
// solution of A z = b, z >= 0, or an infeasibility verdict.
inline LpResult nonneg_solve(const LinearSystem& sys, std::optional<std::size_t> pivot_limit = std::nullopt) {
  const std::size_t m = sys.rows(), n = sys.cols();
  const std::size_t limit = pivot_limit.value_or(default_pivot_limit());
  const std::size_t width = n + m + 1, rhs = n + m;
  std::vector<std::vector<Rational>> t(m, std::vector<Rational>(width));
  std::vector<int> row_sign(m, 1);
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    row_sign[i] = sys.rhs[i] < 0 ? -1 : 1;
    for (std::size_t j = 0; j < n; ++j)
      if (sys.matrix(i, j) != 0) t[i][j] = row_sign[i] < 0 ? Rational(-sys.matrix(i, j)) : sys.matrix(i, j);
    t[i][n + i] = 1;
    t[i][rhs] = row_sign[i] < 0 ? Rational(-sys.rhs[i]) : sys.rhs[i];
    basis[i] = n + i;
  }
  // reduced costs of the artificial objective; the rhs slot holds -w
  std::vector<Rational> obj(width);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (t[i][j] != 0) obj[j] -= t[i][j];
    obj[rhs] -= t[i][rhs];
  }

  LpResult res;
  while (true) {
    std::size_t enter = n;
    for (std::size_t j = 0; j < n; ++j)
      if (obj[j] < 0) {
        enter = j;
        break;
      }
    if (enter == n) break;
    std::size_t leave = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= 0) continue;
      Rational ratio = t[i][rhs] / t[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break;  // unbounded direction; cannot happen for a bounded phase-I objective
    if (res.pivots >= limit) {
      res.status = LpStatus::pivot_limit;
      return res;
    }
    ++res.pivots;
    Rational inv = 1 / t[leave][enter];
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < width; ++j)
      if (t[leave][j] != 0) {
        t[leave][j] *= inv;
        nz.push_back(j);
      }
    auto eliminate = [&](std::vector<Rational>& row) {
      if (row[enter] == 0) return;
      Rational f = row[enter];
      for (std::size_t j : nz) row[j] -= f * t[leave][j];
    };
    for (std::size_t i = 0; i < m; ++i)
      if (i != leave) eliminate(t[i]);
    eliminate(obj);
    basis[leave] = enter;
  }

  res.phase_one_value = -obj[rhs];
  res.solution.assign(n, Rational(0));
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) res.solution[basis[i]] = t[i][rhs];
  if (res.phase_one_value > 0) {
    res.status = LpStatus::infeasible;
    res.farkas.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      Rational y = 1 - obj[n + i];
      res.farkas[i] = row_sign[i] < 0 ? Rational(-y) : y;
    }
    return res;
  }
  res.status = LpStatus::feasible;
  return res;
}

// Consistency of A z = b by rank(A) = rank([A|b]).
inline bool solvable(const LinearSystem& sys) {
  return solve_any(sys.matrix, sys.rhs).has_value();
}

// Column-deletion subsystem: drop column j and every row touching it.
inline LinearSystem column_deleted_subsystem(const LinearSystem& sys, std::size_t j) {
  std::vector<std::size_t> keep_rows;
  for (std::size_t i = 0; i < sys.rows(); ++i)
    if (sys.matrix(i, j) == 0) keep_rows.push_back(i);
  RationalMatrix a(keep_rows.size(), sys.cols() - 1);
  std::vector<Rational> b(keep_rows.size());
  for (std::size_t r = 0; r < keep_rows.size(); ++r) {
    std::size_t c = 0;
    for (std::size_t k = 0; k < sys.cols(); ++k) {
      if (k == j) continue;
      a(r, c++) = sys.matrix(keep_rows[r], k);
    }
    b[r] = sys.rhs[keep_rows[r]];
  }
  return LinearSystem(std::move(a), std::move(b));
}

// Throws HypothesisViolation unless Az=b is consistent, rank(A) > 1 and
// every column deletion drops the rank by exactly one.
inline void check_helly_hypotheses(const LinearSystem& sys) {
  if (!solvable(sys)) throw HypothesisViolation("system is inconsistent");
  const std::size_t r = rank(sys.matrix);
  if (r <= 1) throw HypothesisViolation("rank(A) must exceed 1");
  for (std::size_t j = 0; j < sys.cols(); ++j) {
    LinearSystem sub = column_deleted_subsystem(sys, j);
    if (rank(sub.matrix) != r - 1)
      throw HypothesisViolation("rank(A_" + std::to_string(j) + ") != rank(A) - 1");
  }
}

// Evaluates both sides of the column-deletion equivalence and reports agreement.
inline bool helly_crosscheck(const LinearSystem& sys) {
  check_helly_hypotheses(sys);
  auto direct = nonneg_solve(sys);
  if (direct.status == LpStatus::pivot_limit) throw NumericalFailure("pivot limit in cross-check");
  bool all_sub = true;
  for (std::size_t j = 0; j < sys.cols() && all_sub; ++j) {
    auto r = nonneg_solve(column_deleted_subsystem(sys, j));
    if (r.status == LpStatus::pivot_limit) throw NumericalFailure("pivot limit in cross-check");
    all_sub = r.feasible();
  }
  return direct.feasible() == all_sub;
}

}  // namespace sonc

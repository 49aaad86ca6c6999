#include <gtest/gtest.h>

#include <random>

#include "sonc/lp.hpp"
#include "test_util.hpp"

using namespace sonc;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }

void expect_solution(const LinearSystem& sys, const LpResult& r) {
  ASSERT_TRUE(r.feasible());
  for (const auto& z : r.solution) EXPECT_GE(z, 0);
  EXPECT_EQ(sys.matrix.multiply(r.solution), sys.rhs);
}

void expect_farkas(const LinearSystem& sys, const LpResult& r) {
  ASSERT_EQ(r.status, LpStatus::infeasible);
  EXPECT_GT(r.phase_one_value, 0);
  Rational yb(0);
  for (std::size_t i = 0; i < sys.rows(); ++i) yb += r.farkas[i] * sys.rhs[i];
  EXPECT_GT(yb, 0);
  for (std::size_t j = 0; j < sys.cols(); ++j) {
    Rational s(0);
    for (std::size_t i = 0; i < sys.rows(); ++i) s += r.farkas[i] * sys.matrix(i, j);
    EXPECT_LE(s, 0);
  }
}

// The univariate quartic counterexample system at x = 1: columns are
// (beta=1,{0,2}), (beta=1,{0,4}), (beta=3,{2,4}), (beta=3,{0,4}).
LinearSystem quartic_system() {
  RationalMatrix a{{q(1, 2), q(3, 4), 0, q(1, 4)},
                   {q(1, 2), 0, q(1, 2), 0},
                   {0, q(1, 4), q(1, 2), q(3, 4)},
                   {1, 1, 0, 0},
                   {0, 0, 1, 1}};
  return LinearSystem(a, {q(1), q(4), q(1), q(3), q(3)});
}

}  // namespace

TEST(NonnegSolve, Identity) {
  LinearSystem sys(RationalMatrix{{1, 0}, {0, 1}}, {q(1), q(2)});
  auto r = nonneg_solve(sys);
  expect_solution(sys, r);
  EXPECT_EQ(r.solution, (std::vector<Rational>{q(1), q(2)}));
}

TEST(NonnegSolve, QuarticSystemInfeasible) {
  auto sys = quartic_system();
  expect_farkas(sys, nonneg_solve(sys));
}

TEST(NonnegSolve, NegativeRhsAndEmptyShapes) {
  LinearSystem sys(RationalMatrix{{-1, 1}}, {q(-3)});
  expect_solution(sys, nonneg_solve(sys));
  LinearSystem none(RationalMatrix(2, 0), {q(0), q(0)});
  EXPECT_TRUE(nonneg_solve(none).feasible());
  LinearSystem bad(RationalMatrix(1, 0), {q(1)});
  EXPECT_FALSE(nonneg_solve(bad).feasible());
}

TEST(NonnegSolve, PivotLimitReported) {
  auto sys = quartic_system();
  EXPECT_EQ(nonneg_solve(sys, 0).status, LpStatus::pivot_limit);
}

TEST(NonnegSolve, RandomSystemsSolutionOrFarkas) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> entry(-3, 3);
  int feasible = 0, infeasible = 0;
  for (int t = 0; t < 300; ++t) {
    std::size_t m = 1 + t % 5, n = 1 + (t / 5) % 7;
    RationalMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = entry(rng);
    std::vector<Rational> b(m);
    for (auto& v : b) v = entry(rng);
    LinearSystem sys(a, b);
    auto r = nonneg_solve(sys);
    if (r.feasible()) {
      ++feasible;
      expect_solution(sys, r);
      std::size_t nz = 0;
      for (const auto& z : r.solution) nz += z != 0;
      EXPECT_LE(nz, m);
    } else {
      ++infeasible;
      expect_farkas(sys, r);
    }
    if (!solvable(sys)) EXPECT_FALSE(r.feasible());
  }
  EXPECT_GT(feasible, 20);
  EXPECT_GT(infeasible, 20);
}

TEST(Solvable, Examples) {
  EXPECT_FALSE(solvable(LinearSystem(RationalMatrix{{1}, {1}}, {q(1), q(2)})));
  RationalMatrix a{{1, 2}, {2, 4}, {0, 1}};
  EXPECT_TRUE(solvable(LinearSystem(a, a.multiply(std::vector<Rational>{q(3), q(-1, 2)}))));
}

TEST(Projection, ProjectsOntoColumnSpace) {
  RationalMatrix a{{1, 0}, {0, 1}, {1, 1}};
  std::vector<Rational> b{q(1), q(1), q(3)};
  auto p = project_onto_column_space(a, b);
  EXPECT_TRUE(solvable(LinearSystem(a, p)));
  // residual is orthogonal to the columns
  for (std::size_t j = 0; j < 2; ++j) {
    Rational s(0);
    for (std::size_t i = 0; i < 3; ++i) s += a(i, j) * (b[i] - p[i]);
    EXPECT_EQ(s, 0);
  }
}

TEST(Helly, HypothesisViolationIsDistinct) {
  EXPECT_THROW(helly_crosscheck(LinearSystem(RationalMatrix{{1, 1}}, {q(1)})), HypothesisViolation);
  EXPECT_THROW(helly_crosscheck(LinearSystem(RationalMatrix{{1}, {1}}, {q(1), q(2)})), HypothesisViolation);
}

TEST(Helly, RandomHypothesisSystemsAgree) {
  std::mt19937_64 rng(8);
  int feasible = 0;
  for (int t = 0; t < 60; ++t) {
    auto sys = testutil::random_helly_system(rng, 3 + t % 2, 4 + t % 3);
    EXPECT_TRUE(helly_crosscheck(sys));
    feasible += nonneg_solve(sys).feasible();
  }
  EXPECT_GT(feasible, 5);
  EXPECT_LT(feasible, 55);
}

TEST(Determinant, IntegerAndRationalAgree) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> e(-9, 9);
  for (int t = 0; t < 50; ++t) {
    std::size_t n = 1 + t % 5;
    RationalMatrix m(n, n);
    std::vector<Integer> v;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        int x = e(rng);
        m(i, j) = x;
        v.emplace_back(x);
      }
    EXPECT_EQ(Rational(integer_determinant(v, n)), determinant(m));
  }
}

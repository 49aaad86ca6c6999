#include <gtest/gtest.h>

#include <random>

#include "sonc/necessary.hpp"
#include "sonc/poly.hpp"
#include "test_util.hpp"

using namespace sonc;

namespace {

const char* kSquareExample = "1 + x1^6 + x2^6 + x1^6*x2^6 - x1^2*x2 - 2*x1^4*x2";
const char* kQuarticExample = "1 + 4*x1^2 + x1^4 - 3*x1 - 3*x1^3";

}  // namespace

TEST(Parse, SquareExampleHasSixTerms) {
  auto f = parse_poly(kSquareExample, 2);
  ASSERT_EQ(f.size(), 6u);
  EXPECT_EQ(f.coeff(Exponent{4, 1}), -2);
  EXPECT_EQ(f.coeff(Exponent{2, 1}), -1);
  EXPECT_EQ(f.coeff(Exponent{6, 6}), 1);
  EXPECT_EQ(f.coeff(Exponent{0, 0}), 1);
}

TEST(Parse, ZeroAndCancellation) {
  EXPECT_TRUE(parse_poly("0", 3).is_zero());
  EXPECT_TRUE(parse_poly("x1^2 - x1^2", 1).is_zero());
  EXPECT_EQ(parse_poly("0", 3).to_string(), "0");
}

TEST(Parse, RationalCoefficientsAndRepeatedFactors) {
  auto f = parse_poly(" 3/4 * x1 * x1^2 - 5/10*x2 ", 2);
  EXPECT_EQ(f.coeff(Exponent{3, 0}), make_rational(3, 4));
  EXPECT_EQ(f.coeff(Exponent{0, 1}), make_rational(-1, 2));
  EXPECT_EQ(parse_poly("-x1", 1).coeff(Exponent{1}), -1);
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_poly("garbage", 2), ParseError);
  EXPECT_THROW(parse_poly("x3", 2), ParseError);
  EXPECT_THROW(parse_poly("x1^99999999999999999", 1), ParseError);
  EXPECT_THROW(parse_poly("1/0*x1", 1), ParseError);
  EXPECT_THROW(parse_poly("x1 +", 1), ParseError);
  EXPECT_THROW(parse_poly("", 1), ParseError);
  try {
    parse_poly("1 + y", 1);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
}

TEST(Parse, PrintParseRoundTripOnRandomPolys) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + trial % 4;
    auto f = testutil::random_poly(rng, n, 1 + trial % 9, 7);
    auto text = f.to_string();
    EXPECT_EQ(parse_poly(text, n), f) << text;
  }
}

TEST(Print, CanonicalOrder) {
  EXPECT_EQ(parse_poly(kSquareExample, 2).to_string(), "1 - x1^2*x2 - 2*x1^4*x2 + x1^6 + x2^6 + x1^6*x2^6");
}

TEST(Evaluate, QuarticVanishesAtOne) {
  auto f = parse_poly(kQuarticExample, 1);
  std::vector<Rational> one{Rational(1)};
  EXPECT_EQ(evaluate(f, one), 0);
}

TEST(Evaluate, AllOnesGivesCoefficientSum) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    auto f = testutil::random_poly(rng, 3, 6, 5);
    Rational s(0);
    for (const auto& [e, c] : f.terms()) s += c;
    std::vector<Rational> ones(3, Rational(1));
    EXPECT_EQ(evaluate(f, ones), s);
  }
}

TEST(Evaluate, MotzkinAtOnesAndFloatPath) {
  auto m = parse_poly("x1^4*x2^2 + x1^2*x2^4 + 1 - 3*x1^2*x2^2", 2);
  std::vector<Rational> ones(2, Rational(1));
  EXPECT_EQ(evaluate(m, ones), 0);
  std::vector<double> p{0.5, 2.0};
  // direct hand evaluation: 0.0625*4 + 0.25*16 + 1 - 3*0.25*4
  EXPECT_DOUBLE_EQ(evaluate(m, p), 0.25 + 4.0 + 1.0 - 3.0);
  std::vector<Rational> bad(3);
  EXPECT_THROW(evaluate(m, bad), PreconditionError);
}

TEST(SplitSupport, Examples) {
  auto s = split_support(parse_poly(kQuarticExample, 1));
  EXPECT_EQ(s.lambda_part, (std::vector<Exponent>{{0}, {2}, {4}}));
  EXPECT_EQ(s.gamma_part, (std::vector<Exponent>{{1}, {3}}));
  auto t = split_support(parse_poly("x1^2 + x2^2", 2));
  EXPECT_EQ(t.lambda_part.size(), 2u);
  EXPECT_TRUE(t.gamma_part.empty());
  auto u = split_support(parse_poly("-x1^2", 1));
  EXPECT_TRUE(u.lambda_part.empty());
  EXPECT_EQ(u.gamma_part, (std::vector<Exponent>{{2}}));
}

TEST(SplitSupport, PartitionOnRandomPolys) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    auto f = testutil::random_poly(rng, 2, 8, 6);
    auto s = split_support(f);
    EXPECT_EQ(s.lambda_part.size() + s.gamma_part.size(), f.size());
    for (const auto& e : s.lambda_part) {
      EXPECT_TRUE(e.is_even());
      EXPECT_GT(f.coeff(e), 0);
    }
    for (const auto& e : s.gamma_part) EXPECT_FALSE(e.is_even() && f.coeff(e) > 0);
  }
}

TEST(NecessaryConditions, Examples) {
  auto r1 = necessary_conditions(parse_poly("x1^3 + 1", 1));
  EXPECT_FALSE(r1.pass);
  EXPECT_EQ(r1.clause, NecessaryClause::vertex_not_even);
  EXPECT_EQ(*r1.vertex, Exponent{3});
  auto r2 = necessary_conditions(parse_poly("-x1^2 + 1", 1));
  EXPECT_FALSE(r2.pass);
  EXPECT_EQ(r2.clause, NecessaryClause::vertex_coefficient_not_positive);
  EXPECT_EQ(*r2.vertex, Exponent{2});
  EXPECT_TRUE(necessary_conditions(parse_poly(kSquareExample, 2)).pass);
}

TEST(NecessaryConditions, WitnessIsNegative) {
  for (const char* text : {"x1^3 + 1", "-x1^2 + 1", "x1^2*x2 + x2^2 + 1", "1 + x1^2 - x1^4*x2^2 + x2^6"}) {
    auto f = parse_poly(text, 2);
    auto r = necessary_conditions(f);
    ASSERT_FALSE(r.pass) << text;
    auto w = necessary_witness(f, r);
    ASSERT_TRUE(w.has_value()) << text;
    EXPECT_LT(evaluate(f, *w), 0) << text;
  }
}

TEST(FactorOutMonomial, Examples) {
  auto [a, g] = factor_out_monomial(parse_poly("x1^2*x2 + x1^2*x2^3", 2));
  EXPECT_EQ(a, (Exponent{2, 1}));
  EXPECT_EQ(g, parse_poly("1 + x2^2", 2));
  auto [b, h] = factor_out_monomial(parse_poly("1 + x1^2", 2));
  EXPECT_EQ(b, (Exponent{0, 0}));
  EXPECT_EQ(h, parse_poly("1 + x1^2", 2));
  auto [c, k] = factor_out_monomial(parse_poly("x1^4*x2^2 + x1^2*x2^4", 2));
  EXPECT_EQ(c, (Exponent{2, 2}));
  EXPECT_EQ(k, parse_poly("x1^2 + x2^2", 2));
  EXPECT_THROW(factor_out_monomial(SparsePoly(2)), PreconditionError);
}

TEST(FlipSigns, Examples) {
  auto f = parse_poly("1 + x1^2 + 2*x1", 1);
  EXPECT_EQ(flip_signs(f, SignAssignment({-1})), parse_poly("1 + x1^2 - 2*x1", 1));
  EXPECT_EQ(flip_signs(f, SignAssignment::identity(1)), f);
  EXPECT_EQ(flip_signs(parse_poly("x1^2*x2 - x1*x2^2", 2), SignAssignment({-1, 1})),
            parse_poly("x1^2*x2 + x1*x2^2", 2));
  EXPECT_THROW(SignAssignment({0}), PreconditionError);
}

TEST(FlipSigns, InvolutionOnRandomPolys) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    auto f = testutil::random_poly(rng, 3, 7, 5);
    std::vector<int> s(3);
    for (auto& v : s) v = (rng() & 1) ? 1 : -1;
    SignAssignment sa(s);
    EXPECT_EQ(flip_signs(flip_signs(f, sa), sa), f);
    EXPECT_EQ(flip_signs(f, sa).support(), f.support());
  }
}

TEST(SubstitutePowers, Examples) {
  EXPECT_EQ(substitute_powers(parse_poly("1 + x1^2 - 2*x1", 1), 3), parse_poly("1 + x1^6 - 2*x1^3", 1));
  auto m = parse_poly("x1^4*x2^2 + x1^2*x2^4 + 1 - 3*x1^2*x2^2", 2);
  EXPECT_EQ(substitute_powers(m, 1), m);
  auto s = substitute_powers(m, 5).support();
  std::sort(s.begin(), s.end());
  std::vector<Exponent> expect{{0, 0}, {10, 10}, {10, 20}, {20, 10}};
  EXPECT_EQ(s, expect);
  EXPECT_THROW(substitute_powers(parse_poly("x1^1000000000", 1), 1LL << 20), PreconditionError);
}

TEST(SubstitutePowers, EvaluationIdentity) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 60; ++t) {
    auto f = testutil::random_poly(rng, 2, 5, 4);
    long k = 1 + t % 4;
    auto x = testutil::random_point(rng, 2);
    std::vector<Rational> xk{pow(x[0], static_cast<unsigned long>(k)), pow(x[1], static_cast<unsigned long>(k))};
    EXPECT_EQ(evaluate(substitute_powers(f, k), x), evaluate(f, xk));
  }
}

TEST(SignAssignment, Examples) {
  auto v = find_sign_assignment(2, {{Exponent{1, 0}, Rational(-1)}});
  ASSERT_TRUE(v);
  EXPECT_EQ(v->signs, (std::vector<int>{-1, 1}));
  EXPECT_FALSE(find_sign_assignment(2, {{Exponent{1, 0}, Rational(1)}, {Exponent{3, 0}, Rational(-1)}}));
  auto w = find_sign_assignment(2, {{Exponent{2, 1}, Rational(1)}, {Exponent{4, 1}, Rational(2)}});
  ASSERT_TRUE(w);
  EXPECT_EQ(w->signs, (std::vector<int>{1, 1}));
}

TEST(SignAssignment, ExhaustiveAgreesWithBruteForce) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::pair<Exponent, Rational>> g;
    for (int j = 0; j < 3; ++j) g.emplace_back(testutil::random_exponent(rng, 3, 3), testutil::random_rational(rng));
    auto v = find_sign_assignment(3, g);
    bool any = false;
    for (int mask = 0; mask < 8; ++mask) {
      bool ok = true;
      for (const auto& [b, d] : g) {
        int s = 1;
        for (int i = 0; i < 3; ++i)
          if ((mask >> i & 1) && b[static_cast<std::size_t>(i)] % 2) s = -s;
        if ((d > 0) != (s > 0)) ok = false;
      }
      any = any || ok;
    }
    EXPECT_EQ(v.has_value(), any);
    if (v)
      for (const auto& [b, d] : g) EXPECT_GT(d * v->sign_of(b), 0);
  }
}

TEST(Rationalize, ContinuedFractions) {
  EXPECT_EQ(rationalize(0.5), make_rational(1, 2));
  EXPECT_EQ(rationalize(1.0 / 3.0), make_rational(1, 3));
  EXPECT_EQ(rationalize(0.0), 0);
  double x = 2.113729;
  EXPECT_LE(std::fabs(to_double(rationalize(x)) - x), 1e-12 * x);
  EXPECT_EQ(parse_rational("-6/4"), make_rational(-3, 2));
  EXPECT_THROW(parse_rational("1/0"), ParseError);
  EXPECT_THROW(parse_rational("1.5"), ParseError);
}

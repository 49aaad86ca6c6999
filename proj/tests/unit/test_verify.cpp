#include <gtest/gtest.h>

#include "sonc/decompose.hpp"
#include "sonc/verify.hpp"

using namespace sonc;

namespace {

SoncCertificate motzkin_cert() {
  SoncCertificate c;
  c.nvars = 2;
  c.circuits.push_back({CircuitPoly::make({{Rational(1), Exponent{4, 2}}, {Rational(1), Exponent{2, 4}}, {Rational(1), Exponent{0, 0}}},
                                          Exponent{2, 2}, Rational(3)),
                        std::nullopt});
  return c;
}

}  // namespace

TEST(VerifySonc, EmptyCertificateOfZero) {
  SoncCertificate c;
  c.nvars = 3;
  auto r = verify_sonc(c, SparsePoly(3));
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.sum_residual.is_zero());
}

TEST(VerifySonc, MotzkinExact) {
  auto f = parse_poly("x1^4*x2^2 + x1^2*x2^4 + 1 - 3*x1^2*x2^2", 2);
  auto r = verify_sonc(motzkin_cert(), f);
  EXPECT_TRUE(r.pass);
  ASSERT_EQ(r.per_circuit.size(), 1u);
  EXPECT_EQ(*r.per_circuit[0].theta, ThetaOrder::d_equal);
}

TEST(VerifySonc, InflatedInnerCoefficientFails) {
  auto f = parse_poly("1 + x1^6 + x2^6 + x1^6*x2^6 - x1^2*x2 - 2*x1^4*x2", 2);
  auto o = decompose(f);
  ASSERT_EQ(o.verdict, Verdict::sonc);
  auto cert = *o.certificate;
  // push one circuit to its circuit number, then 1% past it
  auto& c = cert.circuits.front().poly;
  const double theta = circuit_number(c).value();
  c = c.with_d(rationalize(theta * 1.01));
  auto r = verify_sonc(cert, f, VerifyMode::eps(1e-2));
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(*r.per_circuit.front().theta, ThetaOrder::d_above);
}

TEST(VerifySonc, MalformedCircuitsReportedNotThrown) {
  auto f = parse_poly("1 + x1^2 - x1", 1);
  SoncCertificate c;
  c.nvars = 1;
  c.circuits.push_back({CircuitPoly::unchecked({{Rational(-1), Exponent{0}}, {Rational(1), Exponent{2}}}, Exponent{1}, Rational(1)),
                        std::nullopt});
  auto r = verify_sonc(c, f);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.per_circuit[0].theta.has_value());

  SoncCertificate d;
  d.nvars = 1;
  d.circuits.push_back({CircuitPoly::unchecked({{Rational(1), Exponent{0}}, {Rational(1), Exponent{2}}}, Exponent{3}, Rational(1)),
                        std::nullopt});
  EXPECT_FALSE(verify_sonc(d, f).pass);

  SoncCertificate e;
  e.nvars = 1;
  e.monomial_squares.push_back({Rational(1), Exponent{1}});
  EXPECT_FALSE(verify_sonc(e, parse_poly("x1", 1)).pass);
}

TEST(VerifySonc, ResidualModes) {
  auto f = parse_poly("x1^4*x2^2 + x1^2*x2^4 + 1 - 3*x1^2*x2^2", 2);
  auto g = f;
  g.add_term(Exponent{0, 0}, make_rational(1, 1000000000));
  EXPECT_FALSE(verify_sonc(motzkin_cert(), g).pass);
  auto r = verify_sonc(motzkin_cert(), g, VerifyMode::eps(1e-8));
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.residual, 1e-9 / 3, 1e-15);
  EXPECT_FALSE(verify_sonc(motzkin_cert(), g, VerifyMode::eps(1e-10)).pass);
  EXPECT_FALSE(verify_sonc(motzkin_cert(), f, VerifyMode::eps(0)).pass);
}

TEST(VerifySonc, VariableCountMismatch) {
  EXPECT_FALSE(verify_sonc(motzkin_cert(), SparsePoly(3)).pass);
}

TEST(VerifySbs, SingleSquare) {
  SbsCertificate c;
  c.nvars = 2;
  c.squares.push_back({Rational(1), Rational(1), Exponent{0, 0}, Rational(1), Exponent{1, 1}});
  EXPECT_TRUE(verify_sbs(c, parse_poly("1 + x1^2*x2^2 - 2*x1*x2", 2)).pass);
}

TEST(VerifySbs, MissingSquareLeavesResidual) {
  SbsCertificate c;
  c.nvars = 1;
  c.squares.push_back({Rational(1), Rational(1), Exponent{0}, Rational(1), Exponent{1}});
  auto f = parse_poly("1 - 2*x1 + 2*x1^2 - 2*x1^3 + x1^4", 1);
  auto r = verify_sbs(c, f);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.sum_residual.is_zero());
  c.squares.push_back({Rational(1), Rational(1), Exponent{1}, Rational(1), Exponent{2}});
  EXPECT_TRUE(verify_sbs(c, f).pass);
}

TEST(VerifySbs, WeightedSquares) {
  SbsCertificate c;
  c.nvars = 1;
  c.squares.push_back({make_rational(3, 2), Rational(2), Exponent{0}, make_rational(1, 2), Exponent{1}});
  // 3/2 (2 - x/2)^2 = 6 - 3x + 3/8 x^2
  EXPECT_TRUE(verify_sbs(c, parse_poly("6 - 3*x1 + 3/8*x1^2", 1)).pass);
  c.squares[0].weight = -1;
  EXPECT_FALSE(verify_sbs(c, parse_poly("-4 + 2*x1 - 1/4*x1^2", 1)).pass);
}

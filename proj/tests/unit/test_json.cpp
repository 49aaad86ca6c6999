#include <gtest/gtest.h>

#include <random>

#include "sonc/json_io.hpp"
#include "test_util.hpp"

using namespace sonc;

namespace {

const char* kSquareExample = "1 + x1^6 + x2^6 + x1^6*x2^6 - x1^2*x2 - 2*x1^4*x2";

SoncCertificate square_example_cert() {
  auto o = decompose(parse_poly(kSquareExample, 2));
  EXPECT_EQ(o.verdict, Verdict::sonc);
  return *o.certificate;
}

std::string pointer_of(const Json& j) {
  try {
    certificate_from_json(j);
  } catch (const SchemaError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

}  // namespace

TEST(Json, RoundTripPreservesCertificate) {
  const auto cert = square_example_cert();
  const std::string text = serialize(cert);
  const auto back = deserialize(text);
  EXPECT_EQ(back.nvars, cert.nvars);
  EXPECT_EQ(back.mode, cert.mode);
  EXPECT_EQ(back.epsilon, cert.epsilon);
  EXPECT_EQ(back.claimed_sum, cert.claimed_sum);
  EXPECT_EQ(back.recomposed(), cert.recomposed());
  ASSERT_EQ(back.circuits.size(), cert.circuits.size());
  for (std::size_t i = 0; i < cert.circuits.size(); ++i) {
    EXPECT_EQ(back.circuits[i].poly.beta(), cert.circuits[i].poly.beta());
    EXPECT_EQ(back.circuits[i].poly.d(), cert.circuits[i].poly.d());
    const auto& b = back.circuits[i].poly;
    // loaded circuits are unvalidated; the verifier recomputes the coordinates
    EXPECT_FALSE(b.validated());
    EXPECT_EQ(CircuitPoly::make(b.outer(), b.beta(), b.d()).lambdas(), cert.circuits[i].poly.lambdas());
  }
  EXPECT_EQ(serialize(back), text);
  const auto f = parse_poly(kSquareExample, 2);
  EXPECT_EQ(verify_sonc(back, f).pass, verify_sonc(cert, f).pass);
}

TEST(Json, RoundTripRandomCertificates) {
  std::mt19937_64 rng(21);
  int checked = 0;
  for (int t = 0; t < 30; ++t) {
    auto f = testutil::random_single(rng, 1 + t % 3, 4 + t % 3);
    auto o = decompose(f);
    if (!o.certificate) continue;
    ++checked;
    const std::string text = serialize(*o.certificate, t % 2 == 0);
    const auto back = deserialize(text);
    EXPECT_EQ(back.recomposed(), o.certificate->recomposed());
    EXPECT_EQ(serialize(back, t % 2 == 0), text);
  }
  EXPECT_GT(checked, 5);
}

TEST(Json, RationalsAreStrings) {
  auto j = certificate_json(square_example_cert());
  for (const auto& c : j["circuits"]) {
    EXPECT_TRUE(c["inner"]["coeff"].is_string());
    for (const auto& t : c["outer"]) EXPECT_TRUE(t["coeff"].is_string());
  }
  EXPECT_EQ(j["version"], kCertificateVersion);
}

TEST(Json, InnerCoefficientIsThePolynomialCoefficient) {
  auto c = CircuitPoly::make({{Rational(1), Exponent{0}}, {Rational(1), Exponent{2}}}, Exponent{1}, Rational(2));
  SoncCertificate cert;
  cert.nvars = 1;
  cert.circuits = {{c, std::nullopt}};
  cert.claimed_sum = cert.recomposed();
  auto j = certificate_json(cert);
  EXPECT_EQ(j["circuits"][0]["inner"]["coeff"], "-2");
}

TEST(Json, RejectsOtherVersions) {
  auto j = certificate_json(square_example_cert());
  j["version"] = 2;
  EXPECT_EQ(pointer_of(j), "/version");
  j.erase("version");
  EXPECT_EQ(pointer_of(j), "/version");
}

TEST(Json, RejectsZeroBarycentricCoordinate) {
  // inner point on an edge of the outer triangle: one coordinate vanishes
  Json j = Json::parse(R"({"version":1,"nvars":2,"polynomial":{"terms":[]},
    "circuits":[{"outer":[{"coeff":"1","exp":[0,0]},{"coeff":"1","exp":[4,0]},{"coeff":"1","exp":[0,4]}],
                 "inner":{"coeff":"-1","exp":[2,0]}}],
    "monomial_squares":[],"mode":"exact"})");
  EXPECT_EQ(pointer_of(j), "/circuits/0/outer/2");
}

TEST(Json, RejectsMalformedValues) {
  const auto base = certificate_json(square_example_cert());
  {
    auto j = base;
    j["circuits"][1]["outer"][0]["coeff"] = "1/0";
    EXPECT_EQ(pointer_of(j), "/circuits/1/outer/0/coeff");
  }
  {
    auto j = base;
    j["circuits"][0]["inner"]["coeff"] = "abc";
    EXPECT_EQ(pointer_of(j), "/circuits/0/inner/coeff");
  }
  {
    auto j = base;
    j["circuits"][0]["inner"]["exp"] = Json::array({1});
    EXPECT_EQ(pointer_of(j), "/circuits/0/inner/exp");
  }
  {
    auto j = base;
    j["circuits"][0]["outer"][0]["exp"][1] = -2;
    EXPECT_EQ(pointer_of(j), "/circuits/0/outer/0/exp/1");
  }
  {
    auto j = base;
    j["circuits"][0]["outer"] = Json::array({j["circuits"][0]["outer"][0]});
    EXPECT_EQ(pointer_of(j), "/circuits/0/outer");
  }
  {
    auto j = base;
    j["mode"] = "approximate";
    EXPECT_EQ(pointer_of(j), "/mode");
  }
  {
    auto j = base;
    j.erase("monomial_squares");
    EXPECT_EQ(pointer_of(j), "/monomial_squares");
  }
  EXPECT_THROW(deserialize("{not json"), SchemaError);
  EXPECT_THROW(deserialize("[]"), SchemaError);
}

TEST(Json, StructurallyValidButWrongCertificateLoadsAndFailsVerification) {
  auto j = certificate_json(square_example_cert());
  j["circuits"][0]["inner"]["coeff"] = "-100";
  const auto cert = certificate_from_json(j);
  const auto rep = verify_sonc(cert, parse_poly(kSquareExample, 2), VerifyMode::eps(1e-6));
  EXPECT_FALSE(rep.pass);
  auto rj = report_json(rep);
  EXPECT_FALSE(rj["pass"].get<bool>());
  EXPECT_EQ(rj["circuits"][0]["theta"], "d_above");
  EXPECT_FALSE(rj["reasons"].empty());
}

TEST(Json, OutcomeDocuments) {
  auto sonc = outcome_json(decompose(parse_poly(kSquareExample, 2)));
  EXPECT_EQ(sonc["verdict"], "SONC");
  EXPECT_TRUE(sonc.contains("certificate"));

  auto not_sonc = outcome_json(decompose(parse_poly("1 + 4*x1^2 + x1^4 - 3*x1 - 3*x1^3", 1)));
  EXPECT_EQ(not_sonc["verdict"], "NotSONC");
  ASSERT_TRUE(not_sonc.contains("system"));
  const auto& sys = not_sonc["system"];
  EXPECT_EQ(sys["matrix"].size(), sys["rows"].size());
  EXPECT_EQ(sys["matrix"][0].size(), sys["columns"].size());
  EXPECT_EQ(sys["x_star"], Json::array({"1"}));
  EXPECT_FALSE(not_sonc["lp"]["feasible"].get<bool>());

  auto not_psd = outcome_json(decompose(parse_poly("1 + x1^2 - 3*x1", 1)));
  EXPECT_EQ(not_psd["verdict"], "NotPSD");
  ASSERT_TRUE(not_psd.contains("point"));
  const Rational x = parse_rational(not_psd["point"][0].get<std::string>());
  const std::vector<Rational> pt{x};
  EXPECT_LT(evaluate(parse_poly("1 + x1^2 - 3*x1", 1), pt), 0);
}

TEST(Json, MediatedDocument) {
  auto t = Trellis::make({Exponent{0, 0}, Exponent{4, 2}, Exponent{2, 4}});
  auto ms = maximal_mediated_set(t);
  auto j = mediated_json(ms, false);
  EXPECT_EQ(j["trellis"].size(), 3u);
  EXPECT_EQ(j["members"].size(), ms.members.size());
  EXPECT_FALSE(j["is_h_trellis"].get<bool>());
}

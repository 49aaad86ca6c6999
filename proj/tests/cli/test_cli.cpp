#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "sonc/json_io.hpp"

using namespace sonc;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string("'") + SONC_CLI_PATH + "' " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("sonc_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  fs::path dir_;
};

const char* kSquareExample = "1 + x1^6 + x2^6 + x1^6*x2^6 - x1^2*x2 - 2*x1^4*x2";

}  // namespace

TEST_F(Cli, DecomposeThenVerify) {
  auto r = run(std::string("decompose --poly '") + kSquareExample + "' --out " + path("cert.json"));
  ASSERT_EQ(r.status, 0);
  std::ifstream in(path("cert.json"));
  Json j = Json::parse(in);
  EXPECT_EQ(j["verdict"], "SONC");
  EXPECT_EQ(j["nvars"], 2);
  EXPECT_EQ(j["certificate"]["circuits"].size(), 3u);
  EXPECT_TRUE(j["verification"]["pass"].get<bool>());

  auto v = run("verify --cert " + path("cert.json") + " --poly '" + kSquareExample + "'");
  EXPECT_EQ(v.status, 0);
  EXPECT_TRUE(Json::parse(v.out)["pass"].get<bool>());

  // bare certificate, polynomial taken from the file
  write("bare.json", j["certificate"].dump());
  EXPECT_EQ(run("verify --cert " + path("bare.json")).status, 0);
}

TEST_F(Cli, VerdictExitCodes) {
  auto ns = run("decompose --poly '1 + 4*x1^2 + x1^4 - 3*x1 - 3*x1^3'");
  EXPECT_EQ(ns.status, 10);
  auto j = Json::parse(ns.out);
  EXPECT_EQ(j["verdict"], "NotSONC");
  EXPECT_TRUE(j.contains("system"));

  auto np = run("decompose --poly '1 + x1^2 - 3*x1'");
  EXPECT_EQ(np.status, 11);
  EXPECT_EQ(Json::parse(np.out)["verdict"], "NotPSD");
}

TEST_F(Cli, InputErrors) {
  EXPECT_EQ(run("decompose --poly 'garbage'").status, 2);
  EXPECT_EQ(run("decompose").status, 2);
  EXPECT_EQ(run("decompose --poly 'x1' --mode sometimes").status, 2);
  EXPECT_EQ(run("verify --cert " + path("missing.json")).status, 2);
  write("bad.json", "{\"version\": 7}");
  EXPECT_EQ(run("verify --cert " + path("bad.json")).status, 2);
  write("notjson.json", "{");
  EXPECT_EQ(run("verify --cert " + path("notjson.json")).status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
}

TEST_F(Cli, TamperedCertificateFails) {
  ASSERT_EQ(run(std::string("decompose --poly '") + kSquareExample + "' --out " + path("cert.json")).status, 0);
  std::ifstream in(path("cert.json"));
  Json j = Json::parse(in);
  j["certificate"]["circuits"][0]["inner"]["coeff"] = "-50";
  write("tampered.json", j.dump());
  auto v = run("verify --cert " + path("tampered.json") + " --poly '" + kSquareExample + "'");
  EXPECT_EQ(v.status, 1);
  auto rep = Json::parse(v.out);
  EXPECT_FALSE(rep["pass"].get<bool>());
  EXPECT_FALSE(rep["reasons"].empty());
}

TEST_F(Cli, VerifyAgainstDifferentPolynomialFails) {
  ASSERT_EQ(run("decompose --poly '1 + x1^2 - x1' --out " + path("c.json")).status, 0);
  EXPECT_EQ(run("verify --cert " + path("c.json") + " --poly '1 + x1^2 - 2*x1'").status, 1);
  EXPECT_EQ(run("verify --cert " + path("c.json") + " --poly '1 + x2^2'").status, 2);
}

TEST_F(Cli, MediatedSubcommand) {
  auto r = run("mediated --points '0,0 4,2 2,4'");
  ASSERT_EQ(r.status, 0);
  auto j = Json::parse(r.out);
  EXPECT_FALSE(j["is_h_trellis"].get<bool>());
  for (const auto& m : j["members"]) EXPECT_NE(m, Json::array({2, 2}));

  auto d = run("mediated --points '0,0 4,2 2,4' --scale 2");
  ASSERT_EQ(d.status, 0);
  EXPECT_TRUE(Json::parse(d.out)["is_h_trellis"].get<bool>());

  auto u = run("mediated --points '0 4'");
  ASSERT_EQ(u.status, 0);
  EXPECT_EQ(Json::parse(u.out)["members"].size(), 5u);

  EXPECT_EQ(run("mediated --points '0,0 2,2 4,4'").status, 2);
  EXPECT_EQ(run("mediated --points '1,x'").status, 2);
}

TEST_F(Cli, CircuitSubcommand) {
  auto r = run("circuit --poly 'x1^4*x2^2 + x1^2*x2^4 + 1 - 3*x1^2*x2^2'");
  ASSERT_EQ(r.status, 0);
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["theta_compare"], "d_equal");
  EXPECT_EQ(j["verdict"], "nonnegative_boundary");
  EXPECT_NEAR(j["theta"]["value"].get<double>(), 3.0, 1e-12);
  EXPECT_NEAR(j["zero"][0].get<double>(), 1.0, 1e-10);

  auto above = Json::parse(run("circuit --poly 'x1^4*x2^2 + x1^2*x2^4 + 1 - 4*x1^2*x2^2'").out);
  EXPECT_EQ(above["verdict"], "negative_somewhere");

  auto none = Json::parse(run("circuit --poly '1 + x1^2 - x1 - x1^3 + x1^4'").out);
  EXPECT_FALSE(none["is_circuit"].get<bool>());
}

TEST_F(Cli, PrettyOutputAndInputFile) {
  write("f.txt", std::string(kSquareExample) + "\n");
  auto r = run("decompose --input " + path("f.txt") + " --pretty");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\n  \"verdict\""), std::string::npos);
  EXPECT_EQ(Json::parse(r.out)["verdict"], "SONC");
}

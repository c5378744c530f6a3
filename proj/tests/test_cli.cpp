#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "autorb/errors.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using autorb::Complex;
using nlohmann::json;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = autorb::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST(ParseComplex, Forms) {
  using autorb::cli::parse_complex;
  EXPECT_EQ(parse_complex("1+0i"), Complex(1.0, 0.0));
  EXPECT_EQ(parse_complex("-2.5-3i"), Complex(-2.5, -3.0));
  EXPECT_EQ(parse_complex("i"), Complex(0.0, 1.0));
  EXPECT_EQ(parse_complex("-i"), Complex(0.0, -1.0));
  EXPECT_EQ(parse_complex("1e-3+2e+1i"), Complex(1e-3, 20.0));
  EXPECT_EQ(parse_complex("4"), Complex(4.0, 0.0));
  EXPECT_THROW(parse_complex("abc"), autorb::Error);
}

TEST(ParseGrid, LogAndList) {
  const auto g = autorb::cli::parse_grid("10:1e4:log");
  ASSERT_EQ(g.size(), 13u);
  EXPECT_DOUBLE_EQ(g.front(), 10.0);
  EXPECT_NEAR(g.back(), 1e4, 1e-9);
  EXPECT_EQ(autorb::cli::parse_grid("1,2,5"), (std::vector<double>{1, 2, 5}));
  EXPECT_EQ(autorb::cli::parse_grid("1:100:log:3").size(), 3u);
  EXPECT_THROW(autorb::cli::parse_grid("1:100:lin"), autorb::Error);
}

TEST(CmdOrbit, ExpSevenPoints) {
  const auto r = run({"orbit", "--function", "exp", "--z", "1+0i", "--radius", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["orbit"]["count"], 7);
  ASSERT_EQ(j["orbit"]["points"].size(), 7u);
  std::vector<Complex> got;
  for (const auto& p : j["orbit"]["points"]) got.emplace_back(p["location"]["re"].get<double>(), p["location"]["im"].get<double>());
  EXPECT_LE(oracle::match_distance(got, oracle::exp_orbit(1.0, 20.0)), 1e-8);
  EXPECT_TRUE(j["oracle"]["multiplicities_match"].get<bool>());
  // radii are decimal strings
  EXPECT_TRUE(j["orbit"]["contour_radius"].is_string());
  EXPECT_TRUE(j["config"]["radius"].is_string());
}

TEST(CmdOrbit, CosSqrtFivePoints) {
  const auto r = run({"orbit", "--function", "cossqrt", "--z", "1+0i", "--radius", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["orbit"]["points"].size(), 5u);
}

TEST(CmdOrbit, ExcludedFiberRejected) {
  const auto r = run({"orbit", "--function", "monomial", "--n", "4", "--z", "0+0i", "--radius", "1"});
  EXPECT_EQ(r.code, 2);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["status"], "rejected");
  ASSERT_EQ(j["orbit"]["points"].size(), 1u);
  EXPECT_EQ(j["orbit"]["points"][0]["multiplicity"], 4);
  EXPECT_FALSE(j["orbit"]["notes"].empty());
  const json e = json::parse(r.err);
  EXPECT_TRUE(e.contains("error"));
}

TEST(CmdOrbit, MissingRadiusIsStructuredError) {
  const auto r = run({"orbit", "--function", "exp", "--z", "1"});
  EXPECT_EQ(r.code, 2);
  const json e = json::parse(r.err);
  EXPECT_EQ(e["error"]["code"], "Precondition");
}

TEST(CmdOrbit, UnknownFlagIsUsageError) {
  const auto r = run({"orbit", "--bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err)["error"]["code"], "Usage");
}

TEST(CmdOrbit, CsvHasOneRowPerPoint) {
  const auto r = run({"orbit", "--function", "exp", "--z", "1+0i", "--radius", "20", "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(line_count(r.out), 8u);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "re,im,multiplicity,residual");
}

TEST(CmdVerify, CosSqrtAllSuites) {
  const auto r = run({"verify", "--suite", "all", "--function", "cossqrt"});
  EXPECT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_GE(j["summary"]["pass"].get<int>(), 6);
  EXPECT_EQ(j["summary"]["fail"], 0);
  EXPECT_EQ(j["summary"]["error"], 0);
}

TEST(CmdVerify, ExpVanishingIsExpectedFailure) {
  const auto r = run({"verify", "--suite", "vanishing", "--function", "exp"});
  EXPECT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_GE(j["summary"]["xfail"].get<int>(), 1);
  for (const auto& rep : j["reports"]) EXPECT_EQ(rep["expected"], "fail");
}

TEST(CmdVerify, ExpGPasses) {
  const auto r = run({"verify", "--suite", "expg"});
  EXPECT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_FALSE(j["reports"].empty());
  for (const auto& rep : j["reports"]) {
    EXPECT_EQ(rep["verdict"], "pass");
    EXPECT_EQ(std::stod(rep["tolerance"].get<std::string>()), 1e-6);
  }
}

TEST(CmdVerify, UnknownSuiteRejected) {
  const auto r = run({"verify", "--suite", "nope"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err)["error"]["code"], "Precondition");
}

TEST(CmdVerify, EngineErrorInsideSuiteExitsOne) {
  // -1/2 is a double orbit point of z^2 + z, so the chain-rule side is undefined there.
  const auto r = run({"verify", "--suite", "derivsum", "--function", "quadratic", "--z", "-0.5+0i"});
  EXPECT_EQ(r.code, 1);
  EXPECT_GE(json::parse(r.out)["summary"]["error"].get<int>(), 1);
}

TEST(CmdVerify, JsonRoundTripAndCsvRowCount) {
  const auto r = run({"verify", "--suite", "cycle", "--function", "exp"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(json::parse(j.dump()), j);
  const std::string csv = autorb::cli::to_csv(j);
  EXPECT_EQ(line_count(csv), j["reports"].size() + 1);
}

TEST(CmdVerify, SeededRandomSweepIsReproducible) {
  const std::vector<std::string> args{"verify", "--suite", "derivsum", "--function", "exp", "--seed", "7", "--random", "3"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  json ja = json::parse(a.out), jb = json::parse(b.out);
  ja.erase("wall_time_ms");
  jb.erase("wall_time_ms");
  for (auto* j : {&ja, &jb})
    for (auto& rep : (*j)["reports"]) rep.erase("runtime_ms");
  EXPECT_EQ(ja, jb);
  EXPECT_GE(ja["reports"].size(), 3u);
}

TEST(CmdDensity, ExpOrderNearOne) {
  const auto r = run({"density", "--function", "exp", "--z", "1+0i", "--rgrid", "10:1e4:log"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["profile"]["rho_hat"].get<double>(), 1.0, 0.1);
}

TEST(CmdDensity, QuarterWimanRadii) {
  const auto r = run({"density", "--function", "quarter", "--wiman", "--rho", "0.25", "--eps", "0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_GE(j["wiman"]["radii"].size(), 5u);
}

TEST(CmdDensity, PolynomialDegenerateFit) {
  const auto r = run({"density", "--function", "poly", "--coeffs", "1,1", "--z", "1+0i"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["profile"]["flag"], "DegenerateFit");
}

TEST(CmdDensity, CsvRowsMatchJsonRows) {
  const std::vector<std::string> base{"density", "--function", "exp", "--z", "1+0i", "--rgrid", "10,100,1000"};
  const auto jr = run(base);
  auto args = base;
  args.insert(args.end(), {"--format", "csv"});
  const auto cr = run(args);
  ASSERT_EQ(cr.code, 0);
  EXPECT_EQ(line_count(cr.out), json::parse(jr.out)["rows"].size() + 1);
}

TEST(Output, WritesFile) {
  const std::string path = ::testing::TempDir() + "autorb_cli_out.json";
  const auto r = run({"verify", "--suite", "cycle", "--output", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream is(path);
  const json j = json::parse(is);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["config"]["suite"], "cycle");
  std::remove(path.c_str());
}

TEST(Serialization, NonFiniteNumbersBecomeStrings) {
  const json j = autorb::cli::complex_json(Complex(INFINITY, NAN));
  EXPECT_EQ(j["re"], "inf");
  EXPECT_EQ(j["im"], "nan");
}

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using testsupport::data_path;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ultragap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = ultragap::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s, const std::string& prefix) {
  std::istringstream in(s);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) n += line.rfind(prefix, 0) == 0;
  return n;
}

std::string temp_file(const std::string& name, const std::string& contents) {
  const std::string path = std::string(ULTRAGAP_BINARY_TMP) + "/" + name;
  std::ofstream(path) << contents;
  return path;
}

}  // namespace

TEST_CASE("validate exit codes") {
  auto r = invoke({"validate", "--input", data_path("six_point.csv")});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("kind: ultrametric", 0) == 0);

  r = invoke({"validate", "--input", data_path("path3.csv")});
  CHECK(r.code == 1);
  CHECK(r.out.rfind("kind: general-metric", 0) == 0);
  CHECK(count_lines(r.out, "strong triangle violation") == 1);

  r = invoke({"validate", "--input", data_path("ragged.csv")});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);

  r = invoke({"validate", "--input", temp_file("asym.csv", "a,b\n0,1\n2,0\n")});
  CHECK(r.code == 3);
  CHECK(r.out.find("asymmetric") != std::string::npos);

  r = invoke({"validate", "--input", temp_file("tri.csv", "a,b,c\n0,1,5\n1,0,1\n5,1,0\n")});
  CHECK(r.code == 3);
  CHECK(r.out.find("triangle violation") != std::string::npos);

  r = invoke({"validate", "--input", data_path("missing.csv")});
  CHECK(r.code == 2);

  r = invoke({"validate", "--input", data_path("rational3.csv"), "--mode", "rational"});
  CHECK(r.code == 0);
  r = invoke({"validate"});
  CHECK(r.code == 2);
  r = invoke({"frobnicate", "--input", "x"});
  CHECK(r.code == 2);
}

TEST_CASE("gap and oracle") {
  auto r = invoke({"gap", "--input", data_path("six_point.csv"), "--p", "1"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["value"].get<double>() == 0.383333333333);
  CHECK(doc["partitions_explored"].get<int>() == 31);
  CHECK(doc["witness"].size() == 6);

  r = invoke({"gap", "--input", data_path("path3.csv"), "--p", "3"});
  CHECK(r.code == 4);
  const auto fail = nlohmann::json::parse(r.out);
  CHECK(fail["error"] == "negative-type");
  CHECK(fail["omega"].size() == 3);
  CHECK(fail["gamma"].get<double>() < 0.0);

  r = invoke({"gap", "--input", data_path("six_point.csv"), "--p", "40"});
  CHECK(r.code == 2);
  r = invoke({"gap", "--input", data_path("six_point.csv")});
  CHECK(r.code == 2);
  r = invoke({"gap", "--input", data_path("six_point.csv"), "--p", "1", "--out", "csv"});
  CHECK(r.code == 2);

  r = invoke({"oracle", "--input", data_path("six_point.csv"), "--p", "1", "--trials", "100"});
  CHECK(r.code == 2);
  r = invoke({"oracle", "--input", data_path("six_point.csv"), "--p", "1", "--trials", "3000", "--seed", "9"});
  REQUIRE(r.code == 0);
  const auto o = nlohmann::json::parse(r.out);
  CHECK(o["value"].get<double>() >= 23.0 / 60.0 - 1e-9);
  CHECK(o["trials"].get<int>() == 3000);
  const auto again = invoke({"oracle", "--input", data_path("six_point.csv"), "--p", "1", "--trials", "3000", "--seed", "9"});
  CHECK(again.out == r.out);
}

TEST_CASE("asymptote, classify and curve") {
  auto r = invoke({"asymptote", "--input", data_path("six_point.csv")});
  CHECK(r.code == 0);
  CHECK(r.out == "3/7\n0.428571428571\n");
  r = invoke({"asymptote", "--input", data_path("six_point.csv"), "--mode", "rational", "--out", "json"});
  CHECK(r.out == "{\"decimal\":0.428571428571,\"gamma_infinity\":\"3/7\"}\n");
  r = invoke({"asymptote", "--input", data_path("path3.csv")});
  CHECK(r.code == 1);

  r = invoke({"classify", "--input", data_path("discrete5.csv")});
  REQUIRE(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["verdict"] == "ScaledDiscrete");
  CHECK(doc["gamma_zero"] == "5/12");
  r = invoke({"classify", "--input", data_path("two_pairs.csv"), "--mode", "rational"});
  doc = nlohmann::json::parse(r.out);
  CHECK(doc["verdict"] == "ConstantEvenCoteries");
  CHECK(doc["gamma_infinity"] == "1/2");

  r = invoke({"curve", "--input", data_path("six_point.csv"), "--grid", "0:2:2"});
  REQUIRE(r.code == 0);
  CHECK(r.out ==
        "p,gamma,gamma_over_alpha1_p,residual_to_infinity\n"
        "0,0.333333333333,0.333333333333,0.0952380952381\n"
        "1,0.383333333333,0.383333333333,0.0452380952381\n"
        "2,0.40625,0.40625,0.0223214285714\n"
        "inf,,0.428571428571,0\n");
  CHECK(invoke({"curve", "--input", data_path("six_point.csv"), "--grid", "2:0:2"}).code == 2);
  CHECK(invoke({"curve", "--input", data_path("six_point.csv"), "--grid", "0:2"}).code == 2);
  CHECK(invoke({"curve", "--input", data_path("path3.csv"), "--grid", "0:2:2"}).code == 1);
}

TEST_CASE("dendrogram and matrix round trip") {
  auto r = invoke({"dendrogram", "--input", data_path("seven_point.csv"), "--mode", "rational"});
  REQUIRE(r.code == 0);
  const std::string json_path = temp_file("seven.json", r.out);
  r = invoke({"matrix", "--input", json_path, "--mode", "rational"});
  REQUIRE(r.code == 0);
  std::ifstream original(data_path("seven_point.csv"));
  std::stringstream ss;
  ss << original.rdbuf();
  CHECK(r.out == ss.str());
  CHECK(invoke({"dendrogram", "--input", data_path("path3.csv")}).code == 1);
  CHECK(invoke({"matrix", "--input", temp_file("bad.json", "{\"labels\":[\"a\"")}).code == 2);
}

TEST_CASE("verify and coefficients") {
  auto r = invoke({"verify", "--input", data_path("discrete5.csv"), "--G", "5/12", "--p", "0", "--trials", "200",
                   "--seed", "4"});
  REQUIRE(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["holds"] == true);
  CHECK(doc["samples_consistent"] == true);
  r = invoke({"verify", "--input", data_path("path3.csv"), "--G", "0.1", "--p", "3"});
  REQUIRE(r.code == 0);
  doc = nlohmann::json::parse(r.out);
  CHECK(doc["holds"] == false);
  CHECK(doc["gap"].is_null());
  CHECK(doc["violating_zeta"].size() == 3);
  CHECK(invoke({"verify", "--input", data_path("path3.csv"), "--p", "3"}).code == 2);

  r = invoke({"coefficients", "--input", data_path("six_point.csv"), "--mode", "rational", "--simplex",
              data_path("six_point_flat.json")});
  REQUIRE(r.code == 0);
  CHECK(r.out == "k,alpha_k,c_k\n1,1,3/7\n2,2,0\n");
  CHECK(invoke({"coefficients", "--input", data_path("discrete5.csv"), "--simplex", data_path("six_point_flat.json")})
            .code == 2);
}

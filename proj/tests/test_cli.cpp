#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sg/cli.hpp"

using namespace sg;
using nlohmann::json;

namespace {

struct CliRun {
  int rc = 0;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sgsolver");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fixture(const std::string& name) {
  return std::string(SG_MODELS_DIR) + "/" + name + ".json";
}

}  // namespace

TEST_CASE("solve emits a converged json report") {
  CliRun r = cli({"solve", fixture("fig1"), "--epsilon", "1e-6"});
  REQUIRE(r.rc == kExitOk);
  json doc = json::parse(r.out);
  CHECK(doc["status"] == "CONVERGED");
  CHECK(doc["epsilon"] == 1e-6);
  CHECK(doc["iterations"].get<int>() >= 1);
  CHECK(doc["values"]["0"]["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(doc["values"]["0"]["lower"].get<double>() <= doc["values"]["0"]["upper"].get<double>());
  CHECK(doc["values"]["1"]["value"] == 1.0);
  CHECK(doc["values"]["2"]["value"] == 0.0);
  CHECK(doc["values"]["0"].contains("action"));
}

TEST_CASE("a missing model file is an input error") {
  CliRun r = cli({"solve", "/nonexistent/model.json"});
  CHECK(r.rc == kExitInputError);
  CHECK(r.out.empty());
  CHECK(r.err.find("cannot open") != std::string::npos);
}

TEST_CASE("malformed json is an input error with a located message") {
  std::string path = "cli_bad_model.json";
  { std::ofstream(path) << "{\"states\": ["; }
  CliRun r = cli({"solve", path});
  CHECK(r.rc == kExitInputError);
  CHECK(r.err.find("line") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("an unknown algorithm is rejected before touching the model") {
  CliRun r = cli({"solve", fixture("fig1"), "--alg", "bogus"});
  CHECK(r.rc == kExitInputError);
  CHECK(r.err.find("unknown algorithm") != std::string::npos);
}

TEST_CASE("hitting the iteration cap maps to its own exit code") {
  CliRun r = cli({"solve", fixture("fig3"), "--no-ec-handling", "--max-iter", "50"});
  CHECK(r.rc == kExitMaxIterations);
  json doc = json::parse(r.out);
  CHECK(doc["status"] == "MAX_ITERATIONS");
  CHECK(doc["values"]["0"]["upper"] == 1.0);
  CHECK(doc["values"]["0"]["lower"] == 0.0);
}

TEST_CASE("solve can route to the exact oracle") {
  CliRun r = cli({"solve", fixture("fig3"), "--alg", "oracle"});
  REQUIRE(r.rc == kExitOk);
  json doc = json::parse(r.out);
  CHECK(doc["values"]["0"] == "1/2");
}

TEST_CASE("solve writes the iteration trace as csv") {
  std::string path = "cli_trace.csv";
  CliRun r = cli({"solve", fixture("fig4"), "--trace", path});
  REQUIRE(r.rc == kExitOk);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,state,action,reach,stay,l,u,decval_l,decval_u,bes,delayed");
  std::string first_row;
  std::getline(in, first_row);
  CHECK(first_row.rfind("1,", 0) == 0);
  in.close();
  std::remove(path.c_str());
}

TEST_CASE("relative stopping is accepted") {
  CliRun r = cli({"solve", fixture("fig5"), "--relative", "--epsilon", "1e-6"});
  REQUIRE(r.rc == kExitOk);
  json doc = json::parse(r.out);
  CHECK(doc["status"] == "CONVERGED");
}

TEST_CASE("compare prints one csv row per algorithm") {
  CliRun r = cli({"compare", fixture("fig1"), "--algs", "svi,bvi,vi"});
  REQUIRE(r.rc == kExitOk);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "algorithm,iterations,value,width,millis");
  std::vector<std::string> rows;
  while (std::getline(lines, line)) {
    if (!line.empty()) rows.push_back(line);
  }
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("svi,", 0) == 0);
  CHECK(rows[1].rfind("bvi,", 0) == 0);
  CHECK(rows[2].rfind("vi,", 0) == 0);
  // Plain value iteration certifies no width, so the column is empty.
  CHECK(rows[2].find(",,") != std::string::npos);
}

TEST_CASE("inspect reports the graph structure as json") {
  CliRun r = cli({"inspect", fixture("fig5")});
  REQUIRE(r.rc == kExitOk);
  json doc = json::parse(r.out);
  CHECK(doc["targets"] == json::array({3}));
  CHECK(doc["sinks"] == json::array({4}));
  CHECK(doc["unknown"] == json::array({0, 1, 2}));
  CHECK(doc["sccs"].size() == 5);
  CHECK(doc["mecs"].empty());
}

TEST_CASE("inspect lists retained end component actions") {
  CliRun r = cli({"inspect", fixture("fig4")});
  REQUIRE(r.rc == kExitOk);
  json doc = json::parse(r.out);
  REQUIRE(doc["mecs"].size() == 1);
  CHECK(doc["mecs"][0]["states"] == json::array({0, 1}));
}

TEST_CASE("oracle prints exact fractions and a witness strategy") {
  CliRun r = cli({"oracle", fixture("fig3")});
  REQUIRE(r.rc == kExitOk);
  json doc = json::parse(r.out);
  CHECK(doc["values"]["0"] == "1/2");
  CHECK(doc["values"]["1"] == "1");
  CHECK(doc["values"]["2"] == "0");
  CHECK(doc["witness"]["0"] == "b");
}

TEST_CASE("a small harness run reports zero failures") {
  CliRun r = cli({"harness", "--seed", "3", "--n", "5"});
  CHECK(r.rc == kExitOk);
  CHECK(r.out.find("failures: 0") != std::string::npos);
}

TEST_CASE("a bare invocation asks for a subcommand") {
  CliRun r = cli({});
  CHECK(r.rc == kExitInputError);
  CHECK_FALSE(r.err.empty());
}

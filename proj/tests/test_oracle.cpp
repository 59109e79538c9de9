#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <stdexcept>

#include "sg/harness.hpp"
#include "sg/oracle.hpp"
#include "util.hpp"

using namespace sg;

TEST_CASE("mc_reach solves chains exactly") {
  // 0: half to target, quarter back to itself, quarter to the sink.
  // x = 1/2 + 1/4 x  =>  x = 2/3.
  StochasticGame g = game_from_json(R"({"states": [
    {"owner": "max", "actions": [{"label": "a",
      "to": {"0": "1/4", "1": "1/2", "2": "1/4"}}]},
    {"owner": "max", "target": true, "actions": [{"label": "loop", "to": {"1": "1"}}]},
    {"owner": "max", "actions": [{"label": "loop", "to": {"2": "1"}}]}
  ]})");
  std::vector<Rational> v = mc_reach(g);
  CHECK(v[0] == Rational(2, 3));
  CHECK(v[1] == Rational(1));
  CHECK(v[2] == Rational(0));
}

TEST_CASE("mc_reach handles chained unknowns") {
  // Symmetric random walk on 1..3 between sink 0 and target 4:
  // values 1/4, 2/4, 3/4.
  StochasticGame g = game_from_json(R"({"states": [
    {"owner": "max", "actions": [{"label": "loop", "to": {"0": "1"}}]},
    {"owner": "max", "actions": [{"label": "a", "to": {"0": "1/2", "2": "1/2"}}]},
    {"owner": "max", "actions": [{"label": "a", "to": {"1": "1/2", "3": "1/2"}}]},
    {"owner": "max", "actions": [{"label": "a", "to": {"2": "1/2", "4": "1/2"}}]},
    {"owner": "max", "target": true, "actions": [{"label": "loop", "to": {"4": "1"}}]}
  ]})");
  std::vector<Rational> v = mc_reach(g);
  CHECK(v[1] == Rational(1, 4));
  CHECK(v[2] == Rational(1, 2));
  CHECK(v[3] == Rational(3, 4));
}

TEST_CASE("mc_reach rejects real choice") {
  CHECK_THROWS_AS(mc_reach(load_fixture("fig3")), std::invalid_argument);
}

TEST_CASE("exact values on the fixture games") {
  ExactValues f1 = exact_value(load_fixture("fig1"));
  CHECK(f1.values[0] == Rational(1, 2));

  ExactValues f2 = exact_value(load_fixture("fig2"));
  CHECK(f2.values[0] == Rational(0));
  CHECK(f2.values[1] == Rational(0));

  ExactValues f3 = exact_value(load_fixture("fig3"));
  CHECK(f3.values[0] == Rational(1, 2));
  // Cycling on action a forever wins nothing; the witness must leave.
  CHECK(load_fixture("fig3").states[0].actions[f3.witness[0]].label == "b");

  ExactValues f4 = exact_value(load_fixture("fig4"));
  CHECK(f4.values[0] == Rational(1, 2));
  CHECK(f4.values[1] == Rational(1, 2));

  ExactValues f5 = exact_value(load_fixture("fig5"));
  CHECK(f5.values[0] == Rational(1, 2));
  CHECK(f5.values[1] == Rational(1, 2));
  CHECK(f5.values[2] == Rational(1));
}

TEST_CASE("minimizer actually minimizes") {
  // Min chooses between a sure 1/3 and a sure 2/3.
  StochasticGame g = game_from_json(R"({"states": [
    {"owner": "min", "actions": [
      {"label": "lo", "to": {"1": "1/3", "2": "2/3"}},
      {"label": "hi", "to": {"1": "2/3", "2": "1/3"}}]},
    {"owner": "max", "target": true, "actions": [{"label": "loop", "to": {"1": "1"}}]},
    {"owner": "max", "actions": [{"label": "loop", "to": {"2": "1"}}]}
  ]})");
  ExactValues v = exact_value(g);
  CHECK(v.values[0] == Rational(1, 3));
  CHECK(g.states[0].actions[v.witness[0]].label == "lo");
}

TEST_CASE("alternating owners resolve to the game value") {
  // Max picks between going through Min (who can drop to 1/4) and a sure 1/3.
  StochasticGame g = game_from_json(R"({"states": [
    {"owner": "max", "actions": [
      {"label": "viaMin", "to": {"1": "1"}},
      {"label": "direct", "to": {"2": "1/3", "3": "2/3"}}]},
    {"owner": "min", "actions": [
      {"label": "x", "to": {"2": "1/4", "3": "3/4"}},
      {"label": "y", "to": {"2": "1"}}]},
    {"owner": "max", "target": true, "actions": [{"label": "loop", "to": {"2": "1"}}]},
    {"owner": "max", "actions": [{"label": "loop", "to": {"3": "1"}}]}
  ]})");
  ExactValues v = exact_value(g);
  CHECK(v.values[1] == Rational(1, 4));
  CHECK(v.values[0] == Rational(1, 3));
  CHECK(g.states[0].actions[v.witness[0]].label == "direct");
}

TEST_CASE("oracle agrees with mc_reach on single-action games") {
  for (int i = 0; i < 40; ++i) {
    StochasticGame g = random_game(3, i);
    bool chain = true;
    for (const auto& st : g.states) chain = chain && st.actions.size() == 1;
    if (!chain) continue;
    ExactValues v = exact_value(g);
    std::vector<Rational> mc = mc_reach(g);
    for (int s = 0; s < g.num_states(); ++s) CHECK(v.values[s] == mc[s]);
  }
}

TEST_CASE("profile explosion is refused, not attempted") {
  // 21 states with 2 actions each: 2^21 profiles is past the cutoff.
  std::ostringstream os;
  os << R"({"states": [)";
  for (int s = 0; s < 21; ++s) {
    os << R"({"owner": "max", "actions": [)"
       << R"({"label": "a", "to": {")" << (s + 1) % 22 << R"(": "1"}},)"
       << R"({"label": "b", "to": {")" << s << R"(": "1"}}]},)";
  }
  os << R"({"owner": "max", "target": true,
       "actions": [{"label": "loop", "to": {"21": "1"}}]}]})";
  StochasticGame g = game_from_json(os.str());
  CHECK_THROWS_AS(exact_value(g), std::invalid_argument);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>
#include <string>

#include "sg/model.hpp"
#include "util.hpp"

using namespace sg;

TEST_CASE("probability strings parse to exact rationals") {
  CHECK(parse_probability("1/3") == Rational(1, 3));
  CHECK(parse_probability("2/6") == Rational(1, 3));
  CHECK(parse_probability("0.25") == Rational(1, 4));
  CHECK(parse_probability("0.1") == Rational(1, 10));
  CHECK(parse_probability(".5") == Rational(1, 2));
  CHECK(parse_probability("1") == Rational(1));
  CHECK(to_fraction_string(parse_probability("0.2")) == "1/5");
  CHECK(to_fraction_string(Rational(3)) == "3");
  CHECK(to_double(Rational(1, 2)) == 0.5);
}

TEST_CASE("probability grammar rejects everything else") {
  CHECK_THROWS_AS(parse_probability(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_probability("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_probability("-1/2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_probability("+0.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_probability("1e-3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_probability("0.5.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_probability("1/"), std::invalid_argument);
  CHECK_THROWS_AS(parse_probability("/2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_probability("a"), std::invalid_argument);
  CHECK_THROWS_AS(parse_probability("1 /2"), std::invalid_argument);
}

TEST_CASE("valid model parses with exact probabilities and sorted transitions") {
  StochasticGame g = game_from_json(R"({
    "states": [
      {"owner": "max", "actions": [{"label": "a", "to": {"2": "1/3", "0": "1/3", "1": "1/3"}}]},
      {"owner": "min", "target": true, "actions": [{"label": "loop", "to": {"1": "1"}}]},
      {"owner": "max", "actions": [{"label": "loop", "to": {"2": "1"}}]}
    ],
    "initial": 0
  })");
  REQUIRE(g.num_states() == 3);
  CHECK(g.states[0].owner == Owner::kMax);
  CHECK(g.states[1].owner == Owner::kMin);
  CHECK(g.states[1].is_target);
  CHECK_FALSE(g.states[0].is_target);
  CHECK(g.initial == 0);
  const auto& trs = g.states[0].actions[0].transitions;
  REQUIRE(trs.size() == 3);
  CHECK(trs[0].to == 0);
  CHECK(trs[1].to == 1);
  CHECK(trs[2].to == 2);
  CHECK(trs[0].prob == Rational(1, 3));
  CHECK(trs[0].prob_num == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(validate(g).empty());
}

TEST_CASE("number-literal probabilities are rejected") {
  CHECK_THROWS_WITH_AS(
      game_from_json(R"({"states": [
        {"owner": "max", "target": true, "actions": [{"label": "a", "to": {"0": 1.0}}]}
      ]})"),
      doctest::Contains("probabilities must be strings"), ModelError);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_model("{\n  \"states\": [\n    {bad\n");
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    std::string msg = e.what();
    CHECK(msg.find("parse error at line 3") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
  }
}

TEST_CASE("shape errors name the offending state") {
  CHECK_THROWS_WITH_AS(parse_model(R"({"states": [{"owner": "mid",
    "actions": [{"label": "a", "to": {"0": "1"}}]}]})"),
                       doctest::Contains("owner must be 'max' or 'min'"), ModelError);
  CHECK_THROWS_WITH_AS(parse_model(R"({"states": [{"owner": "max"}]})"),
                       doctest::Contains("missing 'actions'"), ModelError);
  CHECK_THROWS_WITH_AS(parse_model(R"({"states": [], "bogus": 1})"),
                       doctest::Contains("unknown key 'bogus'"), ModelError);
}

TEST_CASE("semantic violations are all reported") {
  // Sum != 1 and a dangling successor in one model: both must show up.
  try {
    parse_model(R"({"states": [
      {"owner": "max", "actions": [{"label": "a", "to": {"0": "1/2", "5": "1/3"}}]}
    ]})");
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    std::string msg = e.what();
    CHECK(msg.find("sum") != std::string::npos);
    CHECK(msg.find("5") != std::string::npos);
  }
}

TEST_CASE("validate flags out-of-range initial and stale cached doubles") {
  StochasticGame g = game_from_json(
      R"({"states": [{"owner": "max", "target": true,
          "actions": [{"label": "a", "to": {"0": "1"}}]}]})");
  g.initial = 7;
  auto v = validate(g);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("initial") != std::string::npos);

  g.initial = 0;
  g.states[0].actions[0].transitions[0].prob_num = 0.75;
  v = validate(g);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("cached") != std::string::npos);
}

TEST_CASE("serialize round-trips and is canonical") {
  for (const char* name : {"fig1", "fig2", "fig3", "fig4", "fig5", "trivial"}) {
    StochasticGame g = load_fixture(name);
    std::string text = serialize_model(g);
    StochasticGame back = parse_model(text);
    CHECK(games_equal(g, back));
    CHECK(serialize_model(back) == text);
    CHECK(text.back() == '\n');
  }
}

TEST_CASE("normalize makes targets absorbing and is idempotent") {
  StochasticGame g = parse_model(R"({"states": [
    {"owner": "max", "target": true,
     "actions": [{"label": "a", "to": {"1": "1"}}, {"label": "b", "to": {"0": "1"}}]},
    {"owner": "min", "actions": [{"label": "loop", "to": {"1": "1"}}]}
  ]})");
  normalize(g);
  REQUIRE(g.states[0].actions.size() == 1);
  REQUIRE(g.states[0].actions[0].transitions.size() == 1);
  CHECK(g.states[0].actions[0].transitions[0].to == 0);
  CHECK(g.states[0].actions[0].transitions[0].prob == Rational(1));
  StochasticGame twice = g;
  normalize(twice);
  CHECK(games_equal(g, twice));
}

TEST_CASE("games_equal distinguishes structure") {
  StochasticGame a = load_fixture("fig1");
  StochasticGame b = load_fixture("fig1");
  CHECK(games_equal(a, b));
  b.states[0].actions[0].label = "z";
  CHECK_FALSE(games_equal(a, b));
  StochasticGame c = load_fixture("fig1");
  c.states[0].owner = Owner::kMin;
  CHECK_FALSE(games_equal(a, c));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "sg/harness.hpp"
#include "sg/oracle.hpp"
#include "sg/solver.hpp"
#include "util.hpp"

using namespace sg;

namespace {

SolveOptions base_opts() {
  SolveOptions opts;
  opts.epsilon = 1e-6;
  return opts;
}

}  // namespace

TEST_CASE("a single undecided component reproduces the plain solver exactly") {
  // When the undecided states form one component the region gets the full
  // epsilon budget and the run is the same iteration sequence.
  for (const char* name : {"fig1", "fig2", "fig3", "fig4"}) {
    CAPTURE(name);
    StochasticGame g = load_fixture(name);
    SolveOptions opts = base_opts();
    SolveResult plain = solve(g, opts);
    SolveResult topo = solve_topological(g, opts);
    CHECK(topo.status == plain.status);
    CHECK(topo.iterations == plain.iterations);
    REQUIRE(topo.values.size() == plain.values.size());
    for (std::size_t s = 0; s < plain.values.size(); ++s) {
      CAPTURE(s);
      CHECK(topo.values[s] == plain.values[s]);
      CHECK(topo.lower[s] == plain.lower[s]);
      CHECK(topo.upper[s] == plain.upper[s]);
    }
  }
}

TEST_CASE("a chain of components is solved successors first within budget") {
  StochasticGame g = load_fixture("fig5");
  SolveOptions opts = base_opts();
  SolveResult r = solve_topological(g, opts);
  CHECK(r.status == SolveStatus::kConverged);
  // Three singleton regions, each settling in about one round.
  CHECK(r.iterations <= 5);
  ExactValues exact = exact_value(g);
  for (std::size_t s = 0; s < g.states.size(); ++s) {
    CAPTURE(s);
    double v = to_double(exact.values[s]);
    CHECK(r.lower[s] <= v + 1e-9);
    CHECK(r.upper[s] >= v - 1e-9);
    CHECK(r.upper[s] - r.lower[s] <= 2 * opts.epsilon + 1e-12);
  }
}

TEST_CASE("an exhausted budget certifies untouched components at the trivial interval") {
  // Downstream component 1 is a self loop that stalls when component
  // handling is off; upstream component 0 is then never iterated and must
  // be reported as [0, 1], not as some half-updated interval.
  StochasticGame g = game_from_json(R"({
    "states": [
      {"owner": "max", "actions": [{"label": "go", "to": {"1": "1"}}]},
      {"owner": "max", "actions": [{"label": "stay", "to": {"1": "1"}},
                                   {"label": "exit", "to": {"2": "1/2", "3": "1/2"}}]},
      {"owner": "max", "target": true, "actions": [{"label": "t", "to": {"2": "1"}}]},
      {"owner": "max", "actions": [{"label": "z", "to": {"3": "1"}}]}
    ]
  })");
  SolveOptions opts = base_opts();
  opts.ec_handling = false;
  opts.max_iterations = 50;
  SolveResult r = solve_topological(g, opts);
  CHECK(r.status == SolveStatus::kMaxIterations);
  CHECK(r.lower[0] == 0.0);
  CHECK(r.upper[0] == 1.0);
  CHECK(r.upper[1] == 1.0);
}

TEST_CASE("repeated topological runs are identical") {
  StochasticGame g = load_fixture("fig5");
  SolveOptions opts = base_opts();
  opts.trace = true;
  SolveResult a = solve_topological(g, opts);
  SolveResult b = solve_topological(g, opts);
  CHECK(a.values == b.values);
  CHECK(a.lower == b.lower);
  CHECK(a.upper == b.upper);
  CHECK(a.iterations == b.iterations);
  REQUIRE(a.trace.size() == b.trace.size());
  CHECK_FALSE(a.trace.empty());
  for (const TraceRow& row : a.trace) {
    // Only undecided states are iterated, hence traced.
    CHECK(row.state <= 2);
  }
}

TEST_CASE("topological and plain agree with the oracle on random games") {
  SolveOptions opts = base_opts();
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    StochasticGame g = random_game(31, i);
    ExactValues exact;
    try {
      exact = exact_value(g);
    } catch (const std::invalid_argument&) {
      continue;
    }
    ++checked;
    CAPTURE(i);
    SolveResult plain = solve(g, opts);
    SolveResult topo = solve_topological(g, opts);
    REQUIRE(plain.status == SolveStatus::kConverged);
    REQUIRE(topo.status == SolveStatus::kConverged);
    for (std::size_t s = 0; s < g.states.size(); ++s) {
      CAPTURE(s);
      double v = to_double(exact.values[s]);
      CHECK(plain.lower[s] <= v + 1e-9);
      CHECK(plain.upper[s] >= v - 1e-9);
      CHECK(topo.lower[s] <= v + 1e-9);
      CHECK(topo.upper[s] >= v - 1e-9);
      CHECK(topo.upper[s] - topo.lower[s] <= 2 * opts.epsilon + 1e-12);
      CHECK(std::fabs(topo.values[s] - plain.values[s]) <= 2 * opts.epsilon);
    }
  }
  CHECK(checked >= 60);
}

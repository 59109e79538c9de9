#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "sg/model.hpp"
#include "sg/solver.hpp"

namespace sg {

struct HarnessOptions {
  std::uint64_t seed = 1;
  int games = 100;
  double epsilon = 1e-6;
  int threads = 0;  // 0 = hardware concurrency, capped at 8
};

struct HarnessReport {
  int games = 0;
  int failures = 0;
  int games_with_ec = 0;
  std::vector<std::string> messages;  // per failing game: description + serialized model
};

// Reference end-component enumeration by subset search (usable up to ~16
// states): all ECs contained in `within`, as sorted state sets. An EC is a
// non-empty set where every state keeps an action with support inside the
// set and the kept edges make it strongly connected (self-loop for
// singletons). Used to cross-check the production MEC decomposition and the
// per-iteration best-exit bookkeeping.
std::vector<std::vector<int>> brute_force_ecs(const StochasticGame& game,
                                              const std::vector<int>& within);

// Deterministic random game for index i under the given master seed:
// 3..6 states, 1..3 actions, 1..3 successors with small-denominator exact
// probabilities, mixed owners, at least one target. Games at odd index get
// every state's reachability of a target forced; games at even half-index
// get an explicit two-state cycle injected so end components are frequent.
StochasticGame random_game(std::uint64_t seed, int index);

// The per-iteration invariant suite as an attachable observer: bound
// soundness against the oracle, reach+stay <= 1, monotone l/u, the
// delay-guard non-increase of reach + stay*u, best-exit coverage of every
// end component, traps worth exactly 0. Violations are appended to
// `violations`, prefixed with `tag`. `oracle` holds the exact values as
// doubles, indexed by state.
IterationObserver invariant_observer(const StochasticGame& game, std::vector<double> oracle,
                                     const SolveOptions& opts, std::string tag,
                                     std::vector<std::string>& violations);

// Differential test run: for each game, the exact oracle plus svi,
// svi-topo, bvi and vi, with every per-iteration invariant checked (bound
// soundness against the oracle, reach+stay <= 1, monotone l/u, non-increase
// of reach + stay*u under the delay guard, best-exit soundness against
// brute-force end-component enumeration, trap values exactly 0) and final
// values compared at epsilon precision. Failures carry the offending model
// so a repro is one paste away.
HarnessReport run_harness(const HarnessOptions& opts, std::ostream& log);

}  // namespace sg

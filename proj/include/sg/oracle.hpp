#pragma once

#include <vector>

#include "sg/model.hpp"

namespace sg {

// Exact reachability probabilities for a Markov chain given as a game where
// every state has exactly one action. Solves the linear system over
// rationals (Gaussian elimination), after fixing 1 on targets and 0 on
// states with no path to a target; the remaining system is non-singular.
// Throws std::invalid_argument if some state has more than one action.
std::vector<Rational> mc_reach(const StochasticGame& chain);

struct ExactValues {
  std::vector<Rational> values;  // per state
  // Optimal action index per state for the state's owner, taken from the
  // lexicographically first optimal deterministic profile.
  std::vector<int> witness;
};

// Reference solver: enumerates all deterministic memoryless strategy
// profiles (optimal ones exist for reachability on both sides), evaluates
// each induced chain exactly, and takes max over Maximizer profiles of the
// min over Minimizer profiles. Cross-checks against min-of-max and throws
// std::logic_error if they disagree. Throws std::invalid_argument when the
// profile space exceeds 10^6.
ExactValues exact_value(const StochasticGame& game);

}  // namespace sg

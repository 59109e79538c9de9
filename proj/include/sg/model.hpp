#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sg/rational.hpp"

namespace sg {

enum class Owner { kMax, kMin };

struct Transition {
  int to = 0;
  Rational prob;       // exact value, in (0, 1]
  double prob_num = 0; // cached double of prob, <= 1 ulp away
};

struct ActionRecord {
  std::string label;
  std::vector<Transition> transitions; // sorted by successor index, no duplicates
};

struct StateRecord {
  int id = 0; // equals the state's position in StochasticGame::states
  Owner owner = Owner::kMax;
  bool is_target = false;
  std::vector<ActionRecord> actions; // non-empty
};

// Turn-based stochastic game (or MDP when one player owns no states).
struct StochasticGame {
  std::vector<StateRecord> states;
  std::optional<int> initial;

  int num_states() const { return static_cast<int>(states.size()); }
};

// Raised on malformed model text. Syntax errors carry line/column, semantic
// errors carry every violation found, one per line.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Parses the JSON model format. Probabilities must be strings ("0.25" or
// "1/3"); JSON number literals are rejected because binary floats cannot
// represent most of them exactly. The parsed game is validated; any semantic
// violation raises ModelError.
StochasticGame parse_model(const std::string& text);

// Canonical JSON text: 2-space indent, fixed key order, transitions by
// ascending successor index, trailing newline. parse(serialize(g)) == g.
std::string serialize_model(const StochasticGame& game);

// Returns all semantic violations (empty means valid): empty action sets,
// probabilities outside (0,1], action sums != 1, dangling or duplicate
// transitions, id/position mismatches, out-of-range initial state, cached
// doubles disagreeing with the exact probability.
std::vector<std::string> validate(const StochasticGame& game);

// Makes every target state absorbing (single self-loop). Idempotent; value-
// preserving for reachability since play is decided on reaching a target.
void normalize(StochasticGame& game);

bool games_equal(const StochasticGame& a, const StochasticGame& b);

}  // namespace sg

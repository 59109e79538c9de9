#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sg/graph.hpp"
#include "sg/model.hpp"

namespace sg {

enum class StoppingCriterion { kAbsolute, kRelative };
enum class SolveStatus { kConverged, kMaxIterations };

struct SolveOptions {
  double epsilon = 1e-6;
  StoppingCriterion stopping = StoppingCriterion::kAbsolute;
  bool ec_handling = true;
  bool topological = false;
  std::int64_t max_iterations = 10'000'000;
  bool trace = false;
  // Diagnostic only: turning the delay guard off reintroduces the bound
  // oscillation that end-component cycles cause. Keep true in real runs.
  bool delay_guard = true;
};

// chosen[] sentinel values.
inline constexpr int kActionNone = -2;
inline constexpr int kActionDelayed = -1;

// One Jacobi iteration frame. reach/stay are the committed iteration-k
// vectors over the full state space; boundary states (targets, sinks, and in
// the topological variant already-solved components) are encoded directly in
// them as reach=value, stay=0, so the Bellman sums need no case split.
// reach_lo is the lower-flavored twin of reach; outside the topological
// variant the two are identical at all times.
struct IterationState {
  std::int64_t k = 0;
  std::vector<double> reach, reach_lo, stay;
  double l = 0.0, u = 1.0;
  // Sentinels mean "no decision value recorded yet" and are ignored when
  // folding into the bound update.
  double decval_l = std::numeric_limits<double>::infinity();
  double decval_u = -std::numeric_limits<double>::infinity();
  std::vector<int> chosen;           // per state: action index, kActionDelayed, kActionNone
  std::vector<char> delayed;         // marked this iteration
  std::vector<char> bes_forced;      // choice was forced by the best-exit set this iteration

  // Sticky flag: some committed stay mass referenced this state while it was
  // live. A retired state keeps feeding the ratio scan while flagged, because
  // frozen stay compositions can embed its value indefinitely. Never-flagged
  // retired states are provably unreferenced and drop out of the scan.
  std::vector<char> referenced;
  // Set when a referenced state turns out to be a trap (value exactly 0):
  // compositions holding its mass cap the region infimum at 0, so l is reset
  // and may not rise again within this region.
  bool l_pinned_zero = false;

  // Working buffers: the k+1 vectors being assembled, and the stay vector of
  // the previous iteration (drives the live-state filter in the bound
  // update). advance() commits the buffers and bumps k.
  std::vector<double> next_reach, next_reach_lo, next_stay;
  std::vector<double> prev_stay;

  void advance();
  // A state is live while its committed stay mass is positive; once stay
  // hits exactly 0 its value equals reach exactly and every vector is frozen.
  bool live(int s) const { return stay[s] > 0.0; }
};

IterationState init_iteration(const StochasticGame& game, const StatePartition& part);

// Best exit set: per Maximizer state the value-maximal exiting actions, plus
// the states of sub-components with no Maximizer exit at all (traps, whose
// value is exactly 0).
struct BestExitSet {
  std::vector<std::pair<int, int>> pairs;  // (state, action), lexicographic
  std::vector<int> trap_states;            // ascending

  // Per component, the winning exits and every exit that competed. A forced
  // commitment is only certified while its exit stays ranked best, so the
  // decision values must record where any rival exit would overtake it.
  struct ExitGuard {
    std::vector<std::pair<int, int>> winners;
    std::vector<std::pair<int, int>> exits;
  };
  std::vector<ExitGuard> guards;

  bool forces(int s) const;
  int forced_action(int s) const;  // lowest forced action index for s
};

// Recomputes the best-exit structure for the current iteration: on each
// maximal end component among the unknown states, exits are ranked by
// f = reach + stay*u and the winners recursively split the remainder.
// Trap states found on the way are moved to the sink class and their
// vectors zeroed; the partition and iteration state are updated in place.
BestExitSet compute_bes(const StochasticGame& game, StatePartition& part, IterationState& it);

// Action choice for state s: the forced best-exit action if any, else the
// owner's argopt of reach + stay*u (Maximizer) / reach_lo + stay*l
// (Minimizer). Ties break to the lowest action index.
int candidate_action(const StochasticGame& game, const IterationState& it,
                     const BestExitSet& bes, int s);

// One Jacobi evaluation of action a at state s on the iteration-k vectors:
// (reach', reach_lo', stay').
struct Candidate {
  double reach = 0, reach_lo = 0, stay = 0;
};
Candidate bellman_candidate(const StochasticGame& game, const IterationState& it, int s, int a);

// Writes the k+1 entry for s. With EC handling, a Maximizer candidate that
// would raise reach + stay*u is held back: the k values are kept and s is
// marked delayed. Returns true if the candidate was committed.
bool apply_update(const StochasticGame& game, const SolveOptions& opts, IterationState& it,
                  int s, int a, const Candidate& cand);

// Folds this iteration's decision values out of the committed choices, on
// the iteration-k vectors. Skips delayed states (their commitment is old
// and already guarded) and forced states, whose guard is separate: for each
// component the winning exit is compared against every rival exit, feeding
// decval_u with the bound below which the ranking would flip. A free
// Maximizer state's crossings feed decval_u, a Minimizer's feed decval_l;
// only alternatives with strictly positive stay difference count.
// Additionally, a referenced state replacing its vector records the
// old-versus-new crossing on both sides: the stale copies embedded in other
// commitments stay sound only while the old score dominates the new one.
void update_decision_values(const StochasticGame& game, IterationState& it,
                            const BestExitSet& bes, const std::vector<int>& states);

// Tightens l/u from the freshly committed vectors. Blocked while any of
// `states` still has stay == 1; delayed states do not block it, since their
// kept vectors are earlier commitments in full standing. The ratio
// optimization ranges over states that were live at the start of the
// iteration plus referenced retired states (whose ratio is exactly their
// settled value), evaluated on the new vectors; recorded decision values
// fold into the candidates unless still sentinel. While l_pinned_zero is
// set the lower bound stays put.
void update_global_bounds(const SolveOptions& opts, IterationState& it,
                          const std::vector<int>& states, bool any_delayed);

// True when every state in `states` certifies a half-width below epsilon:
// absolute: (reach - reach_lo) + stay*(u - l) < 2*eps
// relative: the same, divided by reach + stay*u (0/0 counts as 0).
bool check_termination(const IterationState& it, const std::vector<int>& states,
                       const SolveOptions& opts, double epsilon);

struct TraceRow {
  std::int64_t k = 0;
  int state = 0;
  std::string action;  // label, or "DELAY"
  double reach = 0, stay = 0, l = 0, u = 1, decval_l = 0, decval_u = 0;
  bool bes_member = false, delayed = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kConverged;
  std::int64_t iterations = 0;
  double epsilon = 0;
  std::vector<double> values;   // per state, midpoint of the certified interval
  std::vector<double> lower;    // certified lower bound per state
  std::vector<double> upper;    // certified upper bound per state
  std::vector<std::string> actions;  // last committed choice per state ("" on boundary)
  std::vector<TraceRow> trace;  // filled when options.trace
};

// Test/diagnostic hook, called once per completed iteration.
struct IterationSnapshot {
  const StochasticGame& game;
  const StatePartition& part;
  const IterationState& it;
  const BestExitSet& bes;
  const std::vector<int>& region;      // states the iteration updated (unknown, minus traps)
  double u_start = 1, l_start = 0;     // bounds the iteration's choices used
  bool any_delayed = false;
};
using IterationObserver = std::function<void(const IterationSnapshot&)>;

// Sound value iteration: anytime lower/upper bounds with guaranteed
// epsilon-precision on convergence, end components resolved through the
// best-exit recursion and the delay guard.
SolveResult solve(const StochasticGame& game, const SolveOptions& opts,
                  const IterationObserver& observer = {});

// Same contract, but processes the SCCs of the unknown region in reverse
// topological order; a converged component becomes a certified-interval
// boundary for its predecessors. Epsilon is budgeted over the SCC height so
// accumulated interval widths stay below 2*epsilon everywhere.
SolveResult solve_topological(const StochasticGame& game, const SolveOptions& opts,
                              const IterationObserver& observer = {});

}  // namespace sg

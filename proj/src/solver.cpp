#include "sg/solver.hpp"

#include <algorithm>
#include <cmath>

#include "ec_recursion.hpp"

namespace sg {

void IterationState::advance() {
  prev_stay = stay;
  std::swap(reach, next_reach);
  std::swap(reach_lo, next_reach_lo);
  std::swap(stay, next_stay);
  ++k;
}

IterationState init_iteration(const StochasticGame& game, const StatePartition& part) {
  const int n = game.num_states();
  IterationState it;
  it.reach.assign(n, 0.0);
  it.reach_lo.assign(n, 0.0);
  it.stay.assign(n, 0.0);
  for (int s = 0; s < n; ++s) {
    switch (part.klass[s]) {
      case StateClass::kTarget:
        it.reach[s] = it.reach_lo[s] = 1.0;
        break;
      case StateClass::kSink:
        break;
      case StateClass::kUnknown:
        it.stay[s] = 1.0;
        break;
    }
  }
  it.chosen.assign(n, kActionNone);
  it.delayed.assign(n, 0);
  it.bes_forced.assign(n, 0);
  it.referenced.assign(n, 0);
  it.next_reach = it.reach;
  it.next_reach_lo = it.reach_lo;
  it.next_stay = it.stay;
  it.prev_stay = it.stay;
  return it;
}

bool BestExitSet::forces(int s) const {
  auto lo = std::lower_bound(pairs.begin(), pairs.end(), std::make_pair(s, 0));
  return lo != pairs.end() && lo->first == s;
}

int BestExitSet::forced_action(int s) const {
  auto lo = std::lower_bound(pairs.begin(), pairs.end(), std::make_pair(s, 0));
  return lo->second;
}

namespace {

void remove_from_sorted(std::vector<int>& v, const std::vector<int>& removed) {
  std::vector<int> out;
  out.reserve(v.size());
  std::set_difference(v.begin(), v.end(), removed.begin(), removed.end(),
                      std::back_inserter(out));
  v = std::move(out);
}

BestExitSet compute_bes_impl(const StochasticGame& game, StatePartition& part,
                             IterationState& it, const MecList& mecs) {
  const int n = game.num_states();
  std::vector<double> f(n);

  // Traps found in one pass lower their neighbours' f to the exact value 0,
  // which can change which exits win elsewhere (and, via forced retirement,
  // which values freeze). Re-rank on a fresh f until no new trap shows up;
  // only the final ranking's exits are binding.
  BestExitSet bes;
  std::vector<detail::EcNode> nodes;
  for (;;) {
    for (int s = 0; s < n; ++s) f[s] = it.reach[s] + it.stay[s] * it.u;
    nodes = detail::collect_ec_nodes(game, f, mecs, part);

    std::vector<int> new_traps;
    for (const detail::EcNode& node : nodes) {
      if (node.trap) new_traps.insert(new_traps.end(), node.states.begin(), node.states.end());
    }
    if (new_traps.empty()) break;
    std::sort(new_traps.begin(), new_traps.end());

    // A trap cannot reach a target under any Maximizer play: value exactly 0.
    // Fold it into the sink class so successors see 0 from this iteration on.
    for (int t : new_traps) {
      part.klass[t] = StateClass::kSink;
      it.reach[t] = it.reach_lo[t] = it.stay[t] = 0.0;
      it.next_reach[t] = it.next_reach_lo[t] = it.next_stay[t] = 0.0;
      it.chosen[t] = kActionNone;
      // Mass committed through the state while it was live now rests on
      // value 0; the region infimum cannot exceed that again.
      if (it.referenced[t]) {
        it.l = 0.0;
        it.l_pinned_zero = true;
      }
    }
    remove_from_sorted(part.unknown, new_traps);
    std::vector<int> merged;
    merged.reserve(part.sinks.size() + new_traps.size());
    std::merge(part.sinks.begin(), part.sinks.end(), new_traps.begin(), new_traps.end(),
               std::back_inserter(merged));
    part.sinks = std::move(merged);
    bes.trap_states.insert(bes.trap_states.end(), new_traps.begin(), new_traps.end());
  }

  for (detail::EcNode& node : nodes) {
    bes.pairs.insert(bes.pairs.end(), node.exits.begin(), node.exits.end());
    if (node.all_exits.size() > 1) {
      bes.guards.push_back({std::move(node.exits), std::move(node.all_exits)});
    }
  }
  std::sort(bes.pairs.begin(), bes.pairs.end());
  std::sort(bes.trap_states.begin(), bes.trap_states.end());
  return bes;
}

}  // namespace

BestExitSet compute_bes(const StochasticGame& game, StatePartition& part, IterationState& it) {
  return compute_bes_impl(game, part, it, mec_decomposition(game, part.unknown));
}

int candidate_action(const StochasticGame& game, const IterationState& it,
                     const BestExitSet& bes, int s) {
  if (bes.forces(s)) return bes.forced_action(s);
  const auto& acts = game.states[s].actions;
  const bool maxer = game.states[s].owner == Owner::kMax;
  int best = 0;
  double best_score = 0;
  double best_stay = 0;
  for (int a = 0; a < static_cast<int>(acts.size()); ++a) {
    Candidate c = bellman_candidate(game, it, s, a);
    double score = maxer ? c.reach + c.stay * it.u : c.reach_lo + c.stay * it.l;
    if (a == 0) {
      best_score = score;
      best_stay = c.stay;
      continue;
    }
    // Score ties break to the smaller stay mass: that choice stays optimal
    // as the bound keeps moving, so it pins no decision value at the bound
    // itself (which would freeze it there). Then the lowest index.
    double tol = 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(best_score));
    bool better;
    if (std::abs(score - best_score) <= tol) {
      better = c.stay < best_stay;
    } else {
      better = maxer ? score > best_score : score < best_score;
    }
    if (better) {
      best = a;
      best_score = score;
      best_stay = c.stay;
    }
  }
  return best;
}

Candidate bellman_candidate(const StochasticGame& game, const IterationState& it, int s, int a) {
  Candidate c;
  for (const auto& tr : game.states[s].actions[a].transitions) {
    c.reach += tr.prob_num * it.reach[tr.to];
    c.reach_lo += tr.prob_num * it.reach_lo[tr.to];
    c.stay += tr.prob_num * it.stay[tr.to];
  }
  return c;
}

bool apply_update(const StochasticGame& game, const SolveOptions& opts, IterationState& it,
                  int s, int a, const Candidate& cand) {
  it.delayed[s] = 0;
  if (opts.ec_handling && opts.delay_guard && game.states[s].owner == Owner::kMax) {
    // End-component cycling shows up as the upper estimate creeping up on
    // stay mass alone; hold the state back until the bound descends below
    // the crossover instead of committing the inflation. A rise carried by
    // reach is different: that mass is settled, the estimate is genuinely
    // catching up (a Minimizer successor may lift its upper score while
    // optimizing its lower one), and holding it back would never resolve.
    // The comparison needs rounding headroom: the two sums land a few ulp
    // apart when equal in exact arithmetic, and a spurious hold never
    // clears.
    double current = it.reach[s] + it.stay[s] * it.u;
    double candidate = cand.reach + cand.stay * it.u;
    double tol = 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, current);
    if (candidate > current + tol && cand.reach <= it.reach[s]) {
      it.next_reach[s] = it.reach[s];
      it.next_reach_lo[s] = it.reach_lo[s];
      it.next_stay[s] = it.stay[s];
      it.chosen[s] = kActionDelayed;
      it.delayed[s] = 1;
      return false;
    }
  }
  it.next_reach[s] = cand.reach;
  it.next_reach_lo[s] = cand.reach_lo;
  it.next_stay[s] = cand.stay;
  it.chosen[s] = a;
  // The committed stay mass is composed of the live successors'; their
  // values stay referenced by this vector even after they retire.
  for (const auto& tr : game.states[s].actions[a].transitions) {
    if (it.stay[tr.to] > 0.0) it.referenced[tr.to] = 1;
  }
  return true;
}

void update_decision_values(const StochasticGame& game, IterationState& it,
                            const BestExitSet& bes, const std::vector<int>& states) {
  for (int s : states) {
    if (!it.live(s)) continue;
    int alpha = it.chosen[s];
    // Delayed states kept an older commitment whose crossings are already on
    // record; forced states are certified through the exit ranking and are
    // guarded below against their rival exits instead of their own actions.
    if (alpha < 0 || bes.forces(s)) continue;
    const auto& acts = game.states[s].actions;
    if (acts.size() < 2) continue;
    const bool maxer = game.states[s].owner == Owner::kMax;
    Candidate ca = bellman_candidate(game, it, s, alpha);
    double a_reach = maxer ? ca.reach : ca.reach_lo;
    for (int b = 0; b < static_cast<int>(acts.size()); ++b) {
      if (b == alpha) continue;
      Candidate cb = bellman_candidate(game, it, s, b);
      double b_reach = maxer ? cb.reach : cb.reach_lo;
      double dstay = ca.stay - cb.stay;
      // Only alternatives shedding stay mass pin down a crossing point; the
      // chosen action stays preferred for every bound beyond it.
      if (dstay <= 0) continue;
      double crossing = (b_reach - a_reach) / dstay;
      if (maxer) {
        it.decval_u = std::max(it.decval_u, crossing);
      } else {
        it.decval_l = std::min(it.decval_l, crossing);
      }
    }
  }

  // A vector that other commitments embedded (referenced) and that is being
  // replaced this iteration lives on inside those chains. The stale slice
  // stays sound only while the old score dominates the new one, so the
  // bounds may not sweep past their crossing: record it on both sides.
  // Ownership does not matter here; upper chains run through Minimizer
  // vectors and lower chains through Maximizer ones all the same.
  for (int s : states) {
    if (it.chosen[s] < 0 || !it.referenced[s]) continue;
    double dstay = it.stay[s] - it.next_stay[s];
    if (dstay <= 0) continue;
    it.decval_u = std::max(it.decval_u, (it.next_reach[s] - it.reach[s]) / dstay);
    it.decval_l = std::min(it.decval_l, (it.next_reach_lo[s] - it.reach_lo[s]) / dstay);
  }

  // A winning exit's commitment certifies the whole component only while it
  // would still win at the lower bound value: record the crossing against
  // every rival exit of the same component. Rivals on other states matter as
  // much as the winner's own alternatives.
  for (const BestExitSet::ExitGuard& g : bes.guards) {
    for (const auto& [ws, wa] : g.winners) {
      Candidate cw = bellman_candidate(game, it, ws, wa);
      for (const auto& [bs, ba] : g.exits) {
        if (bs == ws && ba == wa) continue;
        Candidate cb = bellman_candidate(game, it, bs, ba);
        double dstay = cw.stay - cb.stay;
        if (dstay <= 0) continue;
        double crossing = (cb.reach - cw.reach) / dstay;
        it.decval_u = std::max(it.decval_u, crossing);
      }
    }
  }
}

void update_global_bounds(const SolveOptions& opts, IterationState& it,
                          const std::vector<int>& states, bool any_delayed) {
  (void)opts;
  (void)any_delayed;
  for (int s : states) {
    if (it.stay[s] >= 1.0) return;
  }
  // Delayed states do not block the update: their kept vectors are earlier
  // commitments whose certificates stand, and a held-back state often needs
  // the upper bound to descend below its crossover before it can move at
  // all.

  // Ratio candidates range over states that were live at the start of the
  // iteration plus retired states some committed stay mass still references;
  // the latter contribute their settled value (stay is 0, so ratio = reach).
  // Never-referenced retired states carry no mass and drop out.
  bool have = false;
  double rmax = 0, rmin = 0;
  for (int s : states) {
    if (it.prev_stay[s] <= 0.0 && !it.referenced[s]) continue;
    double denom = 1.0 - it.stay[s];
    double hi = it.reach[s] / denom;
    double lo = it.reach_lo[s] / denom;
    if (!have) {
      rmax = hi;
      rmin = lo;
      have = true;
    } else {
      rmax = std::max(rmax, hi);
      rmin = std::min(rmin, lo);
    }
  }

  bool have_du = it.decval_u > -std::numeric_limits<double>::infinity();
  bool have_dl = it.decval_l < std::numeric_limits<double>::infinity();
  if (have || have_du) {
    double cand = have_du ? (have ? std::max(rmax, it.decval_u) : it.decval_u) : rmax;
    it.u = std::min(it.u, cand);
  }
  if ((have || have_dl) && !it.l_pinned_zero) {
    double cand = have_dl ? (have ? std::min(rmin, it.decval_l) : it.decval_l) : rmin;
    it.l = std::max(it.l, cand);
  }
}

bool check_termination(const IterationState& it, const std::vector<int>& states,
                       const SolveOptions& opts, double epsilon) {
  for (int s : states) {
    double width = (it.reach[s] - it.reach_lo[s]) + it.stay[s] * (it.u - it.l);
    if (opts.stopping == StoppingCriterion::kRelative) {
      double denom = it.reach[s] + it.stay[s] * it.u;
      // denom == 0 forces width == 0; the quotient is 0, not NaN.
      width = denom == 0.0 ? 0.0 : width / denom;
    }
    if (!(width < 2.0 * epsilon)) return false;
  }
  return true;
}

namespace {

struct RunOutcome {
  bool converged = false;
  std::int64_t used = 0;
  std::vector<int> region;  // survivors (traps removed)
};

struct Engine {
  const StochasticGame& game;
  const SolveOptions& opts;
  StatePartition& part;
  IterationState& it;
  const IterationObserver& observer;
  std::vector<TraceRow>* trace = nullptr;

  std::string action_name(int s) const {
    int a = it.chosen[s];
    if (a == kActionDelayed) return "DELAY";
    if (a < 0) return "";
    return game.states[s].actions[a].label;
  }

  RunOutcome run(std::vector<int> region, double eps, std::int64_t budget) {
    it.l = 0.0;
    it.u = 1.0;
    it.decval_l = std::numeric_limits<double>::infinity();
    it.decval_u = -std::numeric_limits<double>::infinity();
    it.l_pinned_zero = false;
    for (int s : region) it.referenced[s] = 0;

    RunOutcome out;
    if (region.empty() || check_termination(it, region, opts, eps)) {
      out.converged = true;
      out.region = std::move(region);
      return out;
    }
    MecList mecs = opts.ec_handling ? mec_decomposition(game, region) : MecList();

    while (out.used < budget) {
      ++out.used;
      BestExitSet bes;
      if (opts.ec_handling) {
        bes = compute_bes_impl(game, part, it, mecs);
        if (!bes.trap_states.empty()) remove_from_sorted(region, bes.trap_states);
      }

      double u_start = it.u, l_start = it.l;
      bool any_delayed = false;
      for (int s : region) {
        it.delayed[s] = 0;
        it.bes_forced[s] = 0;
        if (!it.live(s)) {
          // Retired: vectors frozen, so the next generation must carry the
          // same values or advance() would resurrect a stale buffer.
          it.next_reach[s] = it.reach[s];
          it.next_reach_lo[s] = it.reach_lo[s];
          it.next_stay[s] = 0.0;
          continue;
        }
        it.bes_forced[s] = bes.forces(s) ? 1 : 0;
        int a = candidate_action(game, it, bes, s);
        Candidate cand = bellman_candidate(game, it, s, a);
        if (!apply_update(game, opts, it, s, a, cand)) any_delayed = true;
      }
      update_decision_values(game, it, bes, region);
      it.advance();
      update_global_bounds(opts, it, region, any_delayed);

      if (observer) {
        observer(IterationSnapshot{game, part, it, bes, region, u_start, l_start, any_delayed});
      }
      if (trace) {
        for (int s : region) {
          TraceRow row;
          row.k = it.k;
          row.state = s;
          row.action = action_name(s);
          row.reach = it.reach[s];
          row.stay = it.stay[s];
          row.l = it.l;
          row.u = it.u;
          row.decval_l = it.decval_l;
          row.decval_u = it.decval_u;
          row.bes_member = bes.forces(s);
          row.delayed = it.delayed[s] != 0;
          trace->push_back(std::move(row));
        }
      }
      if (check_termination(it, region, opts, eps)) {
        out.converged = true;
        break;
      }
    }
    out.region = std::move(region);
    return out;
  }

  // Certifies the region at its current bounds and turns every state into a
  // boundary: reach carries the upper value, reach_lo the lower, stay drops
  // to 0. Both vector generations are written so later regions read
  // consistent values after their own advance().
  void collapse(const std::vector<int>& region, double l, double u) {
    for (int s : region) {
      double hi = std::min(1.0, it.reach[s] + it.stay[s] * u);
      double lo = std::max(0.0, it.reach_lo[s] + it.stay[s] * l);
      it.reach[s] = it.next_reach[s] = hi;
      it.reach_lo[s] = it.next_reach_lo[s] = lo;
      it.stay[s] = it.next_stay[s] = 0.0;
    }
  }
};

SolveResult finalize(const StochasticGame& game, const Engine& eng, SolveStatus status,
                     std::int64_t iterations, const SolveOptions& opts,
                     std::vector<TraceRow>&& trace) {
  const IterationState& it = eng.it;
  SolveResult res;
  res.status = status;
  res.iterations = iterations;
  res.epsilon = opts.epsilon;
  const int n = game.num_states();
  res.values.resize(n);
  res.lower.resize(n);
  res.upper.resize(n);
  res.actions.resize(n);
  for (int s = 0; s < n; ++s) {
    res.lower[s] = it.reach_lo[s];
    res.upper[s] = it.reach[s];
    res.values[s] = (it.reach_lo[s] + it.reach[s]) / 2.0;
    res.actions[s] = eng.action_name(s);
  }
  res.trace = std::move(trace);
  return res;
}

}  // namespace

SolveResult solve(const StochasticGame& game, const SolveOptions& opts,
                  const IterationObserver& observer) {
  StatePartition part = compute_partition(game);
  IterationState it = init_iteration(game, part);
  std::vector<TraceRow> rows;
  Engine eng{game, opts, part, it, observer, opts.trace ? &rows : nullptr};

  RunOutcome out = eng.run(part.unknown, opts.epsilon, opts.max_iterations);
  eng.collapse(out.region, it.l, it.u);
  return finalize(game, eng, out.converged ? SolveStatus::kConverged : SolveStatus::kMaxIterations,
                  out.used, opts, std::move(rows));
}

SolveResult solve_topological(const StochasticGame& game, const SolveOptions& opts,
                              const IterationObserver& observer) {
  StatePartition part = compute_partition(game);
  IterationState it = init_iteration(game, part);
  std::vector<TraceRow> rows;
  Engine eng{game, opts, part, it, observer, opts.trace ? &rows : nullptr};

  SccDecomposition dec = sccs(game, part.unknown);
  const int m = static_cast<int>(dec.components.size());

  // Height over the condensation, successors first in dec order. The epsilon
  // budget grows with height so inherited interval widths still leave room:
  // a component at height h certifies width 2*eps*(h+1)/(H+1).
  std::vector<int> height(m, 0);
  for (int c = 0; c < m; ++c) {
    for (int s : dec.components[c]) {
      for (const auto& act : game.states[s].actions) {
        for (const auto& tr : act.transitions) {
          int d = dec.component_of[tr.to];
          if (d >= 0 && d != c) height[c] = std::max(height[c], height[d] + 1);
        }
      }
    }
  }
  int max_height = 0;
  for (int h : height) max_height = std::max(max_height, h);

  std::int64_t total = 0;
  std::int64_t remaining = opts.max_iterations;
  bool all_converged = true;
  for (int c = 0; c < m; ++c) {
    std::vector<int> region;
    for (int s : dec.components[c]) {
      if (part.klass[s] == StateClass::kUnknown) region.push_back(s);
    }
    double eps_c = opts.epsilon * (height[c] + 1) / (max_height + 1);
    RunOutcome out = eng.run(std::move(region), eps_c, remaining);
    total += out.used;
    remaining -= out.used;
    eng.collapse(out.region, it.l, it.u);
    if (!out.converged) {
      all_converged = false;
      // Budget is global: certify the untouched components at [0, 1].
      for (int rest = c + 1; rest < m; ++rest) {
        std::vector<int> r;
        for (int s : dec.components[rest]) {
          if (part.klass[s] == StateClass::kUnknown) r.push_back(s);
        }
        eng.collapse(r, 0.0, 1.0);
      }
      break;
    }
  }
  return finalize(game, eng,
                  all_converged ? SolveStatus::kConverged : SolveStatus::kMaxIterations, total,
                  opts, std::move(rows));
}

}  // namespace sg

#include "sg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <sstream>
#include <thread>

#include "sg/baselines.hpp"
#include "sg/graph.hpp"
#include "sg/oracle.hpp"
#include "sg/result_io.hpp"
#include "sg/solver.hpp"

namespace sg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Closed interval; modulo bias is irrelevant for test-case generation, and
// avoiding std distributions keeps draws identical across standard
// libraries.
int draw(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

Rational small_ratio(int num, int den) { return Rational(num, den); }

}  // namespace

std::vector<std::vector<int>> brute_force_ecs(const StochasticGame& game,
                                              const std::vector<int>& within) {
  std::vector<std::vector<int>> out;
  const int m = static_cast<int>(within.size());
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> set;
    for (int i = 0; i < m; ++i) {
      if (mask & (1u << i)) set.push_back(within[i]);
    }
    std::vector<char> in_set(game.num_states(), 0);
    for (int s : set) in_set[s] = 1;

    // Kept edges: actions whose support stays inside the set.
    bool every_state_keeps = true;
    std::vector<std::vector<int>> adj(game.num_states());
    for (int s : set) {
      bool keeps = false;
      for (const auto& act : game.states[s].actions) {
        bool inside = std::all_of(act.transitions.begin(), act.transitions.end(),
                                  [&](const Transition& tr) { return in_set[tr.to]; });
        if (!inside) continue;
        keeps = true;
        for (const auto& tr : act.transitions) adj[s].push_back(tr.to);
      }
      if (!keeps) {
        every_state_keeps = false;
        break;
      }
    }
    if (!every_state_keeps) continue;

    // Strong connectivity over kept edges (singleton: kept action implies a
    // self-loop, which the reverse check covers too).
    auto covered = [&](bool reverse) {
      std::vector<std::vector<int>> use(game.num_states());
      for (int s : set) {
        for (int t : adj[s]) {
          if (reverse) {
            use[t].push_back(s);
          } else {
            use[s].push_back(t);
          }
        }
      }
      std::vector<char> seen(game.num_states(), 0);
      std::vector<int> work{set[0]};
      seen[set[0]] = 1;
      std::size_t count = 1;
      while (!work.empty()) {
        int v = work.back();
        work.pop_back();
        for (int w : use[v]) {
          if (!seen[w]) {
            seen[w] = 1;
            ++count;
            work.push_back(w);
          }
        }
      }
      return count == set.size();
    };
    if (set.size() == 1) {
      bool self_loop = std::find(adj[set[0]].begin(), adj[set[0]].end(), set[0]) !=
                       adj[set[0]].end();
      if (!self_loop) continue;
    } else if (!covered(false) || !covered(true)) {
      continue;
    }
    out.push_back(std::move(set));
  }
  return out;
}

StochasticGame random_game(std::uint64_t seed, int index) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index))));
  const bool force_reach = (index & 1) == 0;
  const bool inject_ec = ((index >> 1) & 1) == 0;

  const int n = draw(rng, 3, 6);
  StochasticGame game;
  game.states.resize(n);
  for (int s = 0; s < n; ++s) {
    StateRecord& st = game.states[s];
    st.id = s;
    st.owner = draw(rng, 0, 1) == 0 ? Owner::kMax : Owner::kMin;
    const int n_actions = draw(rng, 1, 3);
    for (int a = 0; a < n_actions; ++a) {
      ActionRecord act;
      act.label = std::string(1, static_cast<char>('a' + a));
      const int n_succ = draw(rng, 1, 3);
      std::vector<int> succs;
      while (static_cast<int>(succs.size()) < n_succ) {
        int t = draw(rng, 0, n - 1);
        if (std::find(succs.begin(), succs.end(), t) == succs.end()) succs.push_back(t);
      }
      std::sort(succs.begin(), succs.end());
      std::vector<int> weights(succs.size());
      int total = 0;
      for (auto& w : weights) {
        w = draw(rng, 1, 6);
        total += w;
      }
      for (std::size_t i = 0; i < succs.size(); ++i) {
        Transition tr;
        tr.to = succs[i];
        tr.prob = small_ratio(weights[i], total);
        tr.prob_num = to_double(tr.prob);
        act.transitions.push_back(tr);
      }
      st.actions.push_back(std::move(act));
    }
  }

  const int n_targets = draw(rng, 1, std::max(1, n / 3));
  std::vector<int> targets;
  while (static_cast<int>(targets.size()) < n_targets) {
    int t = draw(rng, 0, n - 1);
    if (std::find(targets.begin(), targets.end(), t) == targets.end()) {
      targets.push_back(t);
      game.states[t].is_target = true;
    }
  }

  if (inject_ec) {
    std::vector<int> open;
    for (int s = 0; s < n; ++s) {
      if (!game.states[s].is_target) open.push_back(s);
    }
    if (open.size() >= 2) {
      int a = open[draw(rng, 0, static_cast<int>(open.size()) - 1)];
      int b = a;
      while (b == a) b = open[draw(rng, 0, static_cast<int>(open.size()) - 1)];
      // Overwrite the last action's distribution in place; the label stays,
      // so per-state label uniqueness is preserved.
      auto make_cycle = [](StateRecord& st, int to) {
        ActionRecord& act = st.actions.back();
        act.transitions.clear();
        Transition tr;
        tr.to = to;
        tr.prob = 1;
        tr.prob_num = 1.0;
        act.transitions.push_back(tr);
      };
      make_cycle(game.states[a], b);
      make_cycle(game.states[b], a);
    }
  }

  if (force_reach) {
    // Point one action of every sink straight at a target; repeat because a
    // rewrite can orphan other states. Each fixed state stays fixed, so this
    // terminates within n rounds.
    for (int round = 0; round < n + 1; ++round) {
      StatePartition part = compute_partition(game);
      if (part.sinks.empty()) break;
      for (int z : part.sinks) {
        ActionRecord& act = game.states[z].actions[0];
        act.transitions.clear();
        Transition tr;
        tr.to = targets[draw(rng, 0, static_cast<int>(targets.size()) - 1)];
        tr.prob = 1;
        tr.prob_num = 1.0;
        act.transitions.push_back(tr);
      }
    }
  }

  if (inject_ec) {
    // Reach-forcing may have rewritten a single-action cycle state; if no
    // end component survived, rebuild one out of states whose first action
    // (the reachability edge) stays untouched.
    StatePartition part = compute_partition(game);
    if (mec_decomposition(game, part.unknown).empty()) {
      std::vector<int> candidates;
      for (int s = 0; s < n; ++s) {
        if (!game.states[s].is_target && game.states[s].actions.size() >= 2) {
          candidates.push_back(s);
        }
      }
      if (candidates.size() >= 2) {
        auto cycle_last = [](StateRecord& st, int to) {
          ActionRecord& act = st.actions.back();
          act.transitions.clear();
          Transition tr;
          tr.to = to;
          tr.prob = 1;
          tr.prob_num = 1.0;
          act.transitions.push_back(tr);
        };
        cycle_last(game.states[candidates[0]], candidates[1]);
        cycle_last(game.states[candidates[1]], candidates[0]);
      }
    }
  }

  game.initial = 0;
  normalize(game);
  return game;
}

namespace {

struct GameFailure {
  std::vector<std::string> problems;

  void add(const std::string& msg) { problems.push_back(msg); }
  bool ok() const { return problems.empty(); }
};

// Per-iteration invariant checks for one solver run, fed through the
// observer hook. Holds the previous iteration's vectors to check the
// monotone non-increase of reach + stay*u under the delay guard.
struct InvariantChecker {
  std::vector<double> oracle;  // exact values as doubles
  SolveOptions opts;
  std::vector<std::string>& msgs;
  std::string tag;
  std::vector<double> prev_reach, prev_stay;
  static constexpr double kSlack = 1e-9;

  InvariantChecker(const StochasticGame& game, std::vector<double> oracle_,
                   const SolveOptions& opts_, std::vector<std::string>& msgs_, std::string tag_)
      : oracle(std::move(oracle_)), opts(opts_), msgs(msgs_), tag(std::move(tag_)) {
    StatePartition part = compute_partition(game);
    IterationState init = init_iteration(game, part);
    prev_reach = init.reach;
    prev_stay = init.stay;
  }

  void add(const std::string& m) { msgs.push_back(m); }

  void operator()(const IterationSnapshot& snap) {
    const IterationState& it = snap.it;
    auto where = [&](int s) {
      return tag + " k=" + std::to_string(it.k) + " state " + std::to_string(s) + ": ";
    };

    if (it.u < it.l - 1e-12) {
      add(tag + " k=" + std::to_string(it.k) + ": bounds crossed, l=" +
               format_double(it.l) + " u=" + format_double(it.u));
    }
    if (it.l < snap.l_start || it.u > snap.u_start) {
      add(tag + " k=" + std::to_string(it.k) + ": bounds widened, l " +
               format_double(snap.l_start) + "->" + format_double(it.l) + ", u " +
               format_double(snap.u_start) + "->" + format_double(it.u));
    }

    for (int s : snap.region) {
      if (it.reach[s] + it.stay[s] > 1.0 + kSlack || it.reach[s] < -kSlack ||
          it.stay[s] < 0.0) {
        add(where(s) + "reach+stay out of range: " + format_double(it.reach[s]) + " + " +
                 format_double(it.stay[s]));
      }
      if (it.reach_lo[s] > it.reach[s] + 1e-12) {
        add(where(s) + "lower reach exceeds upper: " + format_double(it.reach_lo[s]) +
                 " > " + format_double(it.reach[s]));
      }
      double lo = it.reach_lo[s] + it.stay[s] * it.l;
      double hi = it.reach[s] + it.stay[s] * it.u;
      if (oracle[s] < lo - kSlack || oracle[s] > hi + kSlack) {
        add(where(s) + "oracle value " + format_double(oracle[s]) +
                 " outside certified [" + format_double(lo) + ", " + format_double(hi) + "]");
      }
      // The delay guard keeps Maximizer estimates from creeping upward on
      // stay mass alone; a rise carried by fresh reach mass is a legitimate
      // catch-up, and a Minimizer optimizing its lower score may raise its
      // upper one freely.
      if (opts.ec_handling && opts.delay_guard && snap.game.states[s].owner == Owner::kMax) {
        double before = prev_reach[s] + prev_stay[s] * snap.u_start;
        double after = it.reach[s] + it.stay[s] * snap.u_start;
        if (after > before + kSlack && it.reach[s] <= prev_reach[s] + kSlack) {
          add(where(s) + "upper estimate increased: " + format_double(before) + " -> " +
                   format_double(after));
        }
      }
    }

    // Trap states must be worth exactly 0; forcing bookkeeping must cover
    // every end component that is not itself trapped.
    for (int t : snap.bes.trap_states) {
      if (oracle[t] != 0.0) {
        add(where(t) + "trapped but oracle value is " + format_double(oracle[t]));
      }
    }
    if (opts.ec_handling) {
      for (const Mec& m : mec_decomposition(snap.game, snap.region)) {
        bool has_pair = std::any_of(m.states.begin(), m.states.end(),
                                    [&](int s) { return snap.bes.forces(s); });
        if (!has_pair) {
          add(tag + " k=" + std::to_string(it.k) + ": end component {" +
                   std::to_string(m.states.front()) + ",...} has neither exits nor trap verdict");
        }
      }
    }

    prev_reach = it.reach;
    prev_stay = it.stay;
  }
};

std::vector<double> oracle_doubles(const ExactValues& exact) {
  std::vector<double> out(exact.values.size());
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = to_double(exact.values[s]);
  return out;
}

void check_final(const std::string& tag, const SolveResult& res,
                 const std::vector<double>& oracle, double epsilon, GameFailure& fail) {
  if (res.status != SolveStatus::kConverged) {
    fail.add(tag + ": did not converge within the iteration budget");
    return;
  }
  for (std::size_t s = 0; s < oracle.size(); ++s) {
    if (std::abs(res.values[s] - oracle[s]) > epsilon) {
      fail.add(tag + " state " + std::to_string(s) + ": value " + format_double(res.values[s]) +
               " vs oracle " + format_double(oracle[s]));
    }
    if (oracle[s] < res.lower[s] - 1e-9 || oracle[s] > res.upper[s] + 1e-9) {
      fail.add(tag + " state " + std::to_string(s) + ": oracle " + format_double(oracle[s]) +
               " outside final [" + format_double(res.lower[s]) + ", " +
               format_double(res.upper[s]) + "]");
    }
    if (res.upper[s] - res.lower[s] > 2.0 * epsilon + 1e-12) {
      fail.add(tag + " state " + std::to_string(s) + ": certified width " +
               format_double(res.upper[s] - res.lower[s]) + " exceeds 2*epsilon");
    }
  }
}

struct GameOutcome {
  bool ok = true;
  bool has_ec = false;
  std::string message;
};

GameOutcome run_one(std::uint64_t seed, int index, double epsilon) {
  GameOutcome outcome;
  StochasticGame game = random_game(seed, index);
  GameFailure fail;

  auto violations = validate(game);
  for (const auto& v : violations) fail.add("generator produced invalid model: " + v);

  StatePartition part = compute_partition(game);
  outcome.has_ec = !mec_decomposition(game, part.unknown).empty();

  ExactValues exact = exact_value(game);
  std::vector<double> oracle = oracle_doubles(exact);
  for (int s : part.targets) {
    if (exact.values[s] != 1) fail.add("target state with oracle value != 1");
  }
  for (int s : part.sinks) {
    if (exact.values[s] != 0) fail.add("sink state with oracle value != 0");
  }

  // The production MEC decomposition must list exactly the maximal elements
  // of the brute-force EC enumeration.
  {
    auto ecs = brute_force_ecs(game, part.unknown);
    MecList mecs = mec_decomposition(game, part.unknown);
    for (const auto& ec : ecs) {
      bool contained = std::any_of(mecs.begin(), mecs.end(), [&](const Mec& m) {
        return std::includes(m.states.begin(), m.states.end(), ec.begin(), ec.end());
      });
      if (!contained) fail.add("brute-force EC not covered by any MEC");
    }
    for (const Mec& m : mecs) {
      if (std::find(ecs.begin(), ecs.end(), m.states) == ecs.end()) {
        fail.add("MEC is not an EC by brute force");
      }
    }
  }

  SolveOptions opts;
  opts.epsilon = epsilon;
  opts.trace = true;

  InvariantChecker chk_plain(game, oracle, opts, fail.problems, "svi");
  SolveResult plain = solve(game, opts, std::ref(chk_plain));
  check_final("svi", plain, oracle, epsilon, fail);

  InvariantChecker chk_topo(game, oracle, opts, fail.problems, "svi-topo");
  SolveResult topo = solve_topological(game, opts, std::ref(chk_topo));
  check_final("svi-topo", topo, oracle, epsilon, fail);

  for (std::size_t s = 0; s < oracle.size(); ++s) {
    if (std::abs(plain.values[s] - topo.values[s]) > 2.0 * epsilon) {
      fail.add("svi and svi-topo disagree at state " + std::to_string(s) + ": " +
               format_double(plain.values[s]) + " vs " + format_double(topo.values[s]));
    }
  }

  // Byte determinism: a repeated run must reproduce the trace exactly.
  SolveResult again = solve(game, opts);
  if (trace_to_csv(again.trace) != trace_to_csv(plain.trace)) {
    fail.add("svi trace differs between two identical runs");
  }

  BaselineResult bvi = run_bvi(game, opts);
  if (bvi.status != SolveStatus::kConverged) {
    fail.add("bvi: did not converge within the iteration budget");
  } else {
    for (std::size_t s = 0; s < oracle.size(); ++s) {
      if (std::abs(bvi.values[s] - oracle[s]) > epsilon) {
        fail.add("bvi state " + std::to_string(s) + ": value " + format_double(bvi.values[s]) +
                 " vs oracle " + format_double(oracle[s]));
      }
      if (oracle[s] < bvi.lower[s] - 1e-9 ||
          (bvi.upper[s] && oracle[s] > *bvi.upper[s] + 1e-9)) {
        fail.add("bvi state " + std::to_string(s) + ": oracle outside [L, U]");
      }
    }
    // L must climb, U must fall, per state over the trace.
    std::vector<double> last_lo(oracle.size(), -1.0), last_hi(oracle.size(), 2.0);
    for (const auto& row : bvi.trace) {
      if (row.lower < last_lo[row.state] - 1e-12) {
        fail.add("bvi lower bound regressed at state " + std::to_string(row.state));
        break;
      }
      last_lo[row.state] = row.lower;
      if (row.upper) {
        if (*row.upper > last_hi[row.state] + 1e-12) {
          fail.add("bvi upper bound increased at state " + std::to_string(row.state));
          break;
        }
        last_hi[row.state] = *row.upper;
      }
    }
  }

  BaselineResult vi = run_vi(game, opts);
  for (std::size_t s = 0; s < oracle.size(); ++s) {
    // VI approximates from below; closeness is deliberately not asserted.
    if (vi.values[s] > oracle[s] + 1e-9) {
      fail.add("vi state " + std::to_string(s) + ": lower iterate overshot the value");
    }
  }

  if (!fail.ok()) {
    outcome.ok = false;
    std::ostringstream os;
    os << "game " << index << " failed:\n";
    for (const auto& p : fail.problems) os << "  " << p << "\n";
    os << "model:\n" << serialize_model(game);
    outcome.message = os.str();
  }
  return outcome;
}

}  // namespace

IterationObserver invariant_observer(const StochasticGame& game, std::vector<double> oracle,
                                     const SolveOptions& opts, std::string tag,
                                     std::vector<std::string>& violations) {
  auto chk = std::make_shared<InvariantChecker>(game, std::move(oracle), opts, violations,
                                                std::move(tag));
  return [chk](const IterationSnapshot& snap) { (*chk)(snap); };
}

HarnessReport run_harness(const HarnessOptions& opts, std::ostream& log) {
  int threads = opts.threads;
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
    threads = std::min(threads, 8);
  }
  threads = std::min(threads, std::max(1, opts.games));

  std::vector<GameOutcome> outcomes(opts.games);
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      int i = next.fetch_add(1);
      if (i >= opts.games) break;
      outcomes[i] = run_one(opts.seed, i, opts.epsilon);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  HarnessReport report;
  report.games = opts.games;
  for (int i = 0; i < opts.games; ++i) {
    if (outcomes[i].has_ec) ++report.games_with_ec;
    if (!outcomes[i].ok) {
      ++report.failures;
      report.messages.push_back(outcomes[i].message);
      log << outcomes[i].message;
    }
  }
  log << "games: " << report.games << ", failures: " << report.failures
      << ", with end components: " << report.games_with_ec << "\n";
  return report;
}

}  // namespace sg

#include "sg/cli.hpp"

#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "sg/baselines.hpp"
#include "sg/harness.hpp"
#include "sg/oracle.hpp"
#include "sg/result_io.hpp"

namespace sg {

namespace {

std::optional<StochasticGame> load_model(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "cannot open '" << path << "'\n";
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    StochasticGame game = parse_model(buf.str());
    normalize(game);
    return game;
  } catch (const ModelError& e) {
    err << path << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions opts;
  opts.epsilon = cfg.epsilon;
  opts.stopping = cfg.stopping;
  opts.ec_handling = cfg.ec_handling;
  opts.topological = cfg.topological;
  opts.max_iterations = cfg.max_iterations;
  opts.trace = !cfg.trace_path.empty();
  return opts;
}

bool write_file(const std::string& path, const std::string& content, std::ostream& err) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    err << "cannot write '" << path << "'\n";
    return false;
  }
  out << content;
  return true;
}

}  // namespace

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto game = load_model(cfg.model_path, err);
  if (!game) return kExitInputError;

  if (cfg.algorithm == "oracle") {
    try {
      ExactValues vals = exact_value(*game);
      out << oracle_to_json(*game, vals);
      return kExitOk;
    } catch (const std::invalid_argument& e) {
      err << e.what() << "\n";
      return kExitInputError;
    }
  }

  SolveOptions opts = solve_options(cfg);
  if (cfg.algorithm == "vi" || cfg.algorithm == "bvi") {
    BaselineResult res = cfg.algorithm == "vi" ? run_vi(*game, opts) : run_bvi(*game, opts);
    if (opts.trace && !write_file(cfg.trace_path, baseline_trace_to_csv(res.trace), err)) {
      return kExitInputError;
    }
    out << baseline_result_to_json(res);
    return res.status == SolveStatus::kConverged ? kExitOk : kExitMaxIterations;
  }
  if (cfg.algorithm == "svi" || cfg.algorithm == "svi-topo") {
    bool topo = cfg.algorithm == "svi-topo" || opts.topological;
    SolveResult res = topo ? solve_topological(*game, opts) : solve(*game, opts);
    if (opts.trace && !write_file(cfg.trace_path, trace_to_csv(res.trace), err)) {
      return kExitInputError;
    }
    out << solve_result_to_json(res);
    return res.status == SolveStatus::kConverged ? kExitOk : kExitMaxIterations;
  }
  err << "unknown algorithm '" << cfg.algorithm << "'\n";
  return kExitInputError;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto game = load_model(cfg.model_path, err);
  if (!game) return kExitInputError;
  int initial = game->initial.value_or(0);

  std::vector<std::string> algs;
  std::stringstream ss(cfg.algs);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) algs.push_back(item);
  }

  out << "algorithm,iterations,value,width,millis\n";
  for (const auto& alg : algs) {
    SolveOptions opts = solve_options(cfg);
    opts.trace = false;
    auto t0 = std::chrono::steady_clock::now();
    std::int64_t iterations = 0;
    double value = 0;
    std::string width;
    if (alg == "svi" || alg == "svi-topo") {
      SolveResult res =
          alg == "svi-topo" ? solve_topological(*game, opts) : solve(*game, opts);
      iterations = res.iterations;
      value = res.values[initial];
      width = format_double(res.upper[initial] - res.lower[initial]);
    } else if (alg == "bvi" || alg == "vi") {
      BaselineResult res = alg == "vi" ? run_vi(*game, opts) : run_bvi(*game, opts);
      iterations = res.iterations;
      value = res.values[initial];
      if (res.upper[initial]) width = format_double(*res.upper[initial] - res.lower[initial]);
    } else {
      err << "unknown algorithm '" << alg << "'\n";
      return kExitInputError;
    }
    auto millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    out << alg << ',' << iterations << ',' << format_double(value) << ',' << width << ','
        << millis << "\n";
  }
  return kExitOk;
}

int cmd_inspect(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto game = load_model(cfg.model_path, err);
  if (!game) return kExitInputError;
  out << inspect_to_json(*game);
  return kExitOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto game = load_model(cfg.model_path, err);
  if (!game) return kExitInputError;
  try {
    ExactValues vals = exact_value(*game);
    out << oracle_to_json(*game, vals);
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return kExitInputError;
  }
}

int cmd_harness(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  (void)err;
  HarnessOptions opts;
  opts.seed = cfg.seed;
  opts.games = cfg.n;
  opts.epsilon = cfg.epsilon;
  HarnessReport report = run_harness(opts, out);
  return report.failures == 0 ? kExitOk : kExitHarnessFailure;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reachability solver for turn-based stochastic games"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("model", cfg.model_path, "model JSON file")->required();
  };
  auto add_solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--epsilon", cfg.epsilon, "precision target");
    cmd->add_flag_callback(
        "--relative", [&] { cfg.stopping = StoppingCriterion::kRelative; },
        "relative stopping criterion");
    cmd->add_flag_callback(
        "--no-ec-handling", [&] { cfg.ec_handling = false; },
        "disable end-component handling (diagnostic)");
    cmd->add_option("--max-iter", cfg.max_iterations, "iteration budget");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one model");
  add_model(solve_cmd);
  solve_cmd->add_option("--alg", cfg.algorithm, "svi | svi-topo | bvi | vi | oracle");
  add_solver_flags(solve_cmd);
  solve_cmd->add_flag("--topological", cfg.topological, "solve SCCs separately");
  solve_cmd->add_option("--trace", cfg.trace_path, "write per-iteration CSV trace here");

  CLI::App* compare_cmd = app.add_subcommand("compare", "run several algorithms side by side");
  add_model(compare_cmd);
  compare_cmd->add_option("--algs", cfg.algs, "comma-separated algorithm list");
  compare_cmd->add_option("--epsilon", cfg.epsilon, "precision target");
  compare_cmd->add_option("--max-iter", cfg.max_iterations, "iteration budget");

  CLI::App* inspect_cmd = app.add_subcommand("inspect", "partition / SCC / MEC report");
  add_model(inspect_cmd);

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "exact rational values");
  add_model(oracle_cmd);

  CLI::App* harness_cmd = app.add_subcommand("harness", "random differential test run");
  harness_cmd->add_option("--seed", cfg.seed, "master seed");
  harness_cmd->add_option("--n", cfg.n, "number of games");
  harness_cmd->add_option("--epsilon", cfg.epsilon, "precision target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << e.what() << "\n";
    return kExitInputError;
  }

  if (solve_cmd->parsed()) return cmd_solve(cfg, out, err);
  if (compare_cmd->parsed()) return cmd_compare(cfg, out, err);
  if (inspect_cmd->parsed()) return cmd_inspect(cfg, out, err);
  if (oracle_cmd->parsed()) return cmd_oracle(cfg, out, err);
  if (harness_cmd->parsed()) return cmd_harness(cfg, out, err);
  err << "no subcommand\n";
  return kExitInputError;
}

}  // namespace sg

#include "sg/result_io.hpp"

#include <charconv>
#include <cmath>

#include <json.hpp>

#include "sg/graph.hpp"

namespace sg {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

// Labels are free-form; keep the CSV parseable if one carries a comma.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

ordered_json values_object(const std::vector<double>& values, const std::vector<double>& lower,
                           const std::vector<double>& upper, const std::vector<std::string>& actions) {
  ordered_json vals = ordered_json::object();
  for (std::size_t s = 0; s < values.size(); ++s) {
    ordered_json entry;
    entry["value"] = values[s];
    entry["lower"] = lower[s];
    entry["upper"] = upper[s];
    entry["action"] = actions[s];
    vals[std::to_string(s)] = std::move(entry);
  }
  return vals;
}

const char* status_name(SolveStatus st) {
  return st == SolveStatus::kConverged ? "CONVERGED" : "MAX_ITERATIONS";
}

}  // namespace

std::string solve_result_to_json(const SolveResult& res) {
  ordered_json j;
  j["status"] = status_name(res.status);
  j["iterations"] = res.iterations;
  j["epsilon"] = res.epsilon;
  j["values"] = values_object(res.values, res.lower, res.upper, res.actions);
  return j.dump(2) + "\n";
}

std::string baseline_result_to_json(const BaselineResult& res) {
  ordered_json j;
  j["algorithm"] = res.algorithm;
  j["status"] = status_name(res.status);
  j["iterations"] = res.iterations;
  j["epsilon"] = res.epsilon;
  ordered_json vals = ordered_json::object();
  for (std::size_t s = 0; s < res.values.size(); ++s) {
    ordered_json entry;
    entry["value"] = res.values[s];
    entry["lower"] = res.lower[s];
    if (res.upper[s]) entry["upper"] = *res.upper[s];
    entry["action"] = res.actions[s];
    vals[std::to_string(s)] = std::move(entry);
  }
  j["values"] = std::move(vals);
  return j.dump(2) + "\n";
}

std::string trace_to_csv(const std::vector<TraceRow>& rows) {
  std::string out = "k,state,action,reach,stay,l,u,decval_l,decval_u,bes,delayed\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k);
    out += ',';
    out += std::to_string(r.state);
    out += ',';
    out += csv_field(r.action);
    out += ',';
    out += format_double(r.reach);
    out += ',';
    out += format_double(r.stay);
    out += ',';
    out += format_double(r.l);
    out += ',';
    out += format_double(r.u);
    out += ',';
    out += format_double(r.decval_l);
    out += ',';
    out += format_double(r.decval_u);
    out += ',';
    out += r.bes_member ? '1' : '0';
    out += ',';
    out += r.delayed ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string baseline_trace_to_csv(const std::vector<BaselineTraceRow>& rows) {
  std::string out = "k,state,action,lower,upper\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k);
    out += ',';
    out += std::to_string(r.state);
    out += ',';
    out += csv_field(r.action);
    out += ',';
    out += format_double(r.lower);
    out += ',';
    if (r.upper) out += format_double(*r.upper);
    out += '\n';
  }
  return out;
}

std::string inspect_to_json(const StochasticGame& game) {
  StatePartition part = compute_partition(game);
  std::vector<int> all(game.num_states());
  for (int s = 0; s < game.num_states(); ++s) all[s] = s;
  SccDecomposition dec = sccs(game, all);
  MecList mecs = mec_decomposition(game, part.unknown);

  ordered_json j;
  j["targets"] = part.targets;
  j["sinks"] = part.sinks;
  j["unknown"] = part.unknown;
  j["sccs"] = dec.components;
  ordered_json jm = ordered_json::array();
  for (const Mec& m : mecs) {
    ordered_json entry;
    entry["states"] = m.states;
    ordered_json acts = ordered_json::object();
    for (std::size_t i = 0; i < m.states.size(); ++i) {
      ordered_json labels = ordered_json::array();
      for (int a : m.actions[i]) labels.push_back(game.states[m.states[i]].actions[a].label);
      acts[std::to_string(m.states[i])] = std::move(labels);
    }
    entry["actions"] = std::move(acts);
    jm.push_back(std::move(entry));
  }
  j["mecs"] = std::move(jm);
  return j.dump(2) + "\n";
}

std::string oracle_to_json(const StochasticGame& game, const ExactValues& vals) {
  ordered_json j;
  ordered_json values = ordered_json::object();
  ordered_json witness = ordered_json::object();
  for (int s = 0; s < game.num_states(); ++s) {
    values[std::to_string(s)] = to_fraction_string(vals.values[s]);
    witness[std::to_string(s)] = game.states[s].actions[vals.witness[s]].label;
  }
  j["values"] = std::move(values);
  j["witness"] = std::move(witness);
  return j.dump(2) + "\n";
}

}  // namespace sg

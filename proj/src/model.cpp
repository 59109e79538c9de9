#include "sg/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace sg {

using ordered_json = nlohmann::ordered_json;

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

[[noreturn]] void bad_probability(const std::string& text) {
  throw std::invalid_argument("bad probability '" + text + "'");
}

}  // namespace

Rational parse_probability(const std::string& text) {
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    std::string num = text.substr(0, slash);
    std::string den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) bad_probability(text);
    Integer d(den);
    if (d == 0) bad_probability(text);
    return Rational(Integer(num), d);
  }
  auto dot = text.find('.');
  std::string intpart = dot == std::string::npos ? text : text.substr(0, dot);
  std::string fracpart = dot == std::string::npos ? std::string() : text.substr(dot + 1);
  if (intpart.empty() && fracpart.empty()) bad_probability(text);
  if (!intpart.empty() && !all_digits(intpart)) bad_probability(text);
  if (!fracpart.empty() && !all_digits(fracpart)) bad_probability(text);
  Integer scaled(intpart.empty() ? "0" : intpart);
  Integer den = 1;
  for (char c : fracpart) {
    scaled = scaled * 10 + (c - '0');
    den *= 10;
  }
  return Rational(scaled, den);
}

std::string to_fraction_string(const Rational& r) {
  Integer num = numerator(r);
  Integer den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

namespace {

[[noreturn]] void syntax_error_at(const std::string& text, std::size_t byte, const std::string& what) {
  // nlohmann reports the byte just past the offending token; clamp and count.
  std::size_t pos = byte == 0 ? 0 : std::min(byte - 1, text.size());
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < pos; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::ostringstream os;
  os << "parse error at line " << line << ", column " << col << ": " << what;
  throw ModelError(os.str());
}

[[noreturn]] void shape_error(const std::string& what) { throw ModelError(what); }

void require_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return it.key() == k; }) == allowed.end()) {
      shape_error(where + ": unknown key '" + it.key() + "'");
    }
  }
}

int parse_state_index(const std::string& key, const std::string& where) {
  if (!all_digits(key) || (key.size() > 1 && key[0] == '0')) {
    shape_error(where + ": bad successor key '" + key + "'");
  }
  if (key.size() > 9) shape_error(where + ": bad successor key '" + key + "'");
  return std::stoi(key);
}

}  // namespace

StochasticGame parse_model(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    syntax_error_at(text, e.byte, e.what());
  }
  if (!doc.is_object()) shape_error("top level: expected an object");
  require_keys(doc, {"states", "initial"}, "top level");
  if (!doc.contains("states") || !doc["states"].is_array()) {
    shape_error("top level: missing 'states' array");
  }

  StochasticGame game;
  int idx = 0;
  for (const auto& js : doc["states"]) {
    std::string where = "state " + std::to_string(idx);
    if (!js.is_object()) shape_error(where + ": expected an object");
    require_keys(js, {"owner", "target", "actions"}, where);
    StateRecord st;
    st.id = idx;
    if (!js.contains("owner") || !js["owner"].is_string()) {
      shape_error(where + ": missing 'owner'");
    }
    std::string owner = js["owner"].get<std::string>();
    if (owner == "max") {
      st.owner = Owner::kMax;
    } else if (owner == "min") {
      st.owner = Owner::kMin;
    } else {
      shape_error(where + ": owner must be 'max' or 'min', got '" + owner + "'");
    }
    if (js.contains("target")) {
      if (!js["target"].is_boolean()) shape_error(where + ": 'target' must be a boolean");
      st.is_target = js["target"].get<bool>();
    }
    if (!js.contains("actions") || !js["actions"].is_array()) {
      shape_error(where + ": missing 'actions' array");
    }
    for (const auto& ja : js["actions"]) {
      if (!ja.is_object()) shape_error(where + ": action must be an object");
      require_keys(ja, {"label", "to"}, where);
      ActionRecord act;
      if (!ja.contains("label") || !ja["label"].is_string()) {
        shape_error(where + ": action missing 'label'");
      }
      act.label = ja["label"].get<std::string>();
      std::string awhere = where + " action " + act.label;
      if (!ja.contains("to") || !ja["to"].is_object()) {
        shape_error(awhere + ": missing 'to' object");
      }
      for (auto it = ja["to"].begin(); it != ja["to"].end(); ++it) {
        Transition tr;
        tr.to = parse_state_index(it.key(), awhere);
        if (!it.value().is_string()) {
          shape_error(awhere + ": probabilities must be strings, use \"1/2\" or \"0.5\"");
        }
        try {
          tr.prob = parse_probability(it.value().get<std::string>());
        } catch (const std::invalid_argument& e) {
          shape_error(awhere + ": " + e.what());
        }
        tr.prob_num = to_double(tr.prob);
        act.transitions.push_back(std::move(tr));
      }
      std::sort(act.transitions.begin(), act.transitions.end(),
                [](const Transition& a, const Transition& b) { return a.to < b.to; });
      st.actions.push_back(std::move(act));
    }
    game.states.push_back(std::move(st));
    ++idx;
  }
  if (doc.contains("initial")) {
    if (!doc["initial"].is_number_integer()) shape_error("top level: 'initial' must be an integer");
    game.initial = doc["initial"].get<int>();
  }

  auto violations = validate(game);
  if (!violations.empty()) {
    std::string msg;
    for (const auto& v : violations) {
      if (!msg.empty()) msg += "\n";
      msg += v;
    }
    throw ModelError(msg);
  }
  return game;
}

std::string serialize_model(const StochasticGame& game) {
  ordered_json doc;
  doc["states"] = ordered_json::array();
  for (const auto& st : game.states) {
    ordered_json js;
    js["owner"] = st.owner == Owner::kMax ? "max" : "min";
    if (st.is_target) js["target"] = true;
    js["actions"] = ordered_json::array();
    for (const auto& act : st.actions) {
      ordered_json ja;
      ja["label"] = act.label;
      ordered_json to = ordered_json::object();
      for (const auto& tr : act.transitions) {
        to[std::to_string(tr.to)] = to_fraction_string(tr.prob);
      }
      ja["to"] = std::move(to);
      js["actions"].push_back(std::move(ja));
    }
    doc["states"].push_back(std::move(js));
  }
  if (game.initial) doc["initial"] = *game.initial;
  return doc.dump(2) + "\n";
}

std::vector<std::string> validate(const StochasticGame& game) {
  std::vector<std::string> out;
  const int n = game.num_states();
  for (int i = 0; i < n; ++i) {
    const StateRecord& st = game.states[i];
    std::string swhere = "state " + std::to_string(i);
    if (st.id != i) {
      out.push_back(swhere + ": id " + std::to_string(st.id) + " does not match position");
    }
    if (st.actions.empty()) {
      out.push_back(swhere + ": no available actions");
      continue;
    }
    std::vector<std::string> labels;
    for (const auto& act : st.actions) {
      std::string awhere = swhere + " action " + act.label;
      if (act.label.empty()) out.push_back(swhere + ": empty action label");
      if (std::find(labels.begin(), labels.end(), act.label) != labels.end()) {
        out.push_back(swhere + ": duplicate action label '" + act.label + "'");
      }
      labels.push_back(act.label);
      Rational sum = 0;
      int prev_to = -1;
      for (const auto& tr : act.transitions) {
        if (tr.to < 0 || tr.to >= n) {
          out.push_back(awhere + ": transition to undefined state " + std::to_string(tr.to));
          continue;
        }
        if (tr.to == prev_to) {
          out.push_back(awhere + ": duplicate transition to state " + std::to_string(tr.to));
        }
        prev_to = tr.to;
        if (tr.prob <= 0 || tr.prob > 1) {
          out.push_back(awhere + ": probability out of range");
        }
        double fresh = to_double(tr.prob);
        bool cached_ok = tr.prob_num == fresh ||
                         tr.prob_num == std::nextafter(fresh, 2.0) ||
                         tr.prob_num == std::nextafter(fresh, -1.0);
        if (!cached_ok) {
          out.push_back(awhere + ": cached probability differs from exact value");
        }
        sum += tr.prob;
      }
      if (sum != 1) {
        out.push_back(awhere + ": probabilities sum to " + to_fraction_string(sum) +
                      ", expected 1");
      }
    }
  }
  if (game.initial && (*game.initial < 0 || *game.initial >= n)) {
    out.push_back("initial state " + std::to_string(*game.initial) + " out of range");
  }
  return out;
}

void normalize(StochasticGame& game) {
  for (auto& st : game.states) {
    if (!st.is_target) continue;
    bool already = st.actions.size() == 1 && st.actions[0].transitions.size() == 1 &&
                   st.actions[0].transitions[0].to == st.id &&
                   st.actions[0].transitions[0].prob == 1;
    if (already) continue;
    ActionRecord loop;
    loop.label = st.actions.empty() ? "loop" : st.actions[0].label;
    Transition tr;
    tr.to = st.id;
    tr.prob = 1;
    tr.prob_num = 1.0;
    loop.transitions.push_back(tr);
    st.actions.clear();
    st.actions.push_back(std::move(loop));
  }
}

bool games_equal(const StochasticGame& a, const StochasticGame& b) {
  if (a.num_states() != b.num_states() || a.initial != b.initial) return false;
  for (int i = 0; i < a.num_states(); ++i) {
    const auto& sa = a.states[i];
    const auto& sb = b.states[i];
    if (sa.id != sb.id || sa.owner != sb.owner || sa.is_target != sb.is_target) return false;
    if (sa.actions.size() != sb.actions.size()) return false;
    for (std::size_t j = 0; j < sa.actions.size(); ++j) {
      const auto& aa = sa.actions[j];
      const auto& ab = sb.actions[j];
      if (aa.label != ab.label || aa.transitions.size() != ab.transitions.size()) return false;
      for (std::size_t t = 0; t < aa.transitions.size(); ++t) {
        if (aa.transitions[t].to != ab.transitions[t].to) return false;
        if (aa.transitions[t].prob != ab.transitions[t].prob) return false;
      }
    }
  }
  return true;
}

}  // namespace sg

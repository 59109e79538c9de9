#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "sg/model.hpp"

// Loads models/<name>.json, parsed and normalized.
inline sg::StochasticGame load_fixture(const std::string& name) {
  std::ifstream in(std::string(SG_MODELS_DIR) + "/" + name + ".json");
  std::ostringstream buf;
  buf << in.rdbuf();
  sg::StochasticGame game = sg::parse_model(buf.str());
  sg::normalize(game);
  return game;
}

inline sg::StochasticGame game_from_json(const std::string& text) {
  sg::StochasticGame game = sg::parse_model(text);
  sg::normalize(game);
  return game;
}

#pragma once

#include <string>

#include "cmg/types.hpp"

namespace cmg {

// Game-spec document (JSON). Field names are part of the file format:
// schema {n, V, domains, roles?}, m, prior {kind, table?, seed?},
// exploits [{"<attr>": [allowed...]}], value {kind, table?},
// cost {per_attribute}.
GameSpec load_game_spec(const std::string& path);
GameSpec parse_game_spec(const std::string& json_text);
std::string game_spec_to_json(const GameSpec& game);
void save_game_spec(const GameSpec& game, const std::string& path);

}  // namespace cmg

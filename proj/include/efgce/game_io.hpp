#pragma once

#include <iosfwd>
#include <string>

#include "efgce/game.hpp"

namespace efgce {

// Line-oriented game format, one record per line:
//   player <n>
//   node <id> player=<i> infoset=<label> actions=<a,...> children=<id,...>
//   chance <id> probs=<p,...> children=<id,...>
//   leaf <id> payoffs=<u1,...,un>
// The first node/chance/leaf record is the root. Ids may be arbitrary
// nonnegative integers. Parse errors carry the offending line number.
RawGame parse_game(std::istream& in);
RawGame parse_game_string(const std::string& text);
RawGame load_game_file(const std::string& path);

// Byte-deterministic: the same game always serializes to the same text.
std::string serialize_game(const RawGame& raw);
inline std::string serialize_game(const Game& g) { return serialize_game(g.raw()); }
void save_game_file(const Game& g, const std::string& path);

}  // namespace efgce

#pragma once

#include <string>
#include <vector>

#include "efgce/game.hpp"

namespace efgce {

// Raw descriptions of the built-in benchmark games.
RawGame kuhn3_raw();        // three-player Kuhn poker, 3-card deck
RawGame sheriff_raw();      // Sheriff bargaining game, 2 rounds, bribes 0..3
RawGame liars_dice3_raw();  // three players, one 3-face die each
RawGame goofspiel3_raw();   // three players, rank 3, limited information

// Known names: kuhn3, sheriff, liars_dice3, goofspiel3, or file:<path>.
// Payoffs are normalized into [-1,1] by a uniform positive rescale.
Game generate_benchmark(const std::string& name);

std::vector<std::string> benchmark_names();

}  // namespace efgce

#pragma once

#include "pipip/game.hpp"

namespace pipip::toys {

// 1 agent on 5 cells in a line, moves of up to two cells (every cell keeps
// at least 3 reachable actions). U = .2 .1 .3 .25 .4, potential identical.
game_definition line_walk();

// 2 agents x 2 actions, complete reachability, identical interest:
// phi(0,0)=0.02, phi(1,1)=0.98, off-diagonal 0. Gaps below 1 so the
// deviation bound holds.
game_definition coordination_2x2();

// 2 agents x 3 actions, complete reachability, identical interest:
// phi = 0.98 when both pick the same action, else 0. Three tied optima.
game_definition coordination_3x3();

// Unscaled 2x2 variant (phi 1 / 2 / 0). Deviations reach 2, so it fails the
// deviation bound and is only used for equilibrium-enumeration tests.
game_definition coordination_2x2_unit();

// 1 agent on a 3-cell path with single-step moves; reachable sets have size
// 2-3. State-space fixture for the two-step chain.
game_definition line3();

} // namespace pipip::toys

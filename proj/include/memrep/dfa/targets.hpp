#pragma once

#include "memrep/dfa/dfa.hpp"

namespace memrep::dfa {

/// Tiles of the grid-world task: water, dryer, lava, recharge.
Alphabet tile_alphabet();

/// Avoid lava and eventually recharge.
Dfa ry_prior();
/// Dry off after water before recharging; conjoined with ry_prior() it
/// gives the full grid-world task.
Dfa bby_task();
/// The full grid-world task (4 states).
Dfa grid_world_task();

/// The seven Tomita languages over {0, 1}.
Dfa tomita(int n);

/// Unary words whose length is a multiple of k.
Dfa modulo_k(std::size_t k);

/// Binary words with no run of more than n zeros.
Dfa scaled_tomita4(std::size_t n);

}  // namespace memrep::dfa

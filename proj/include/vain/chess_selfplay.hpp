#pragma once

#include <cstdint>
#include <vector>

#include "vain/chess_data.hpp"

namespace vain::chess {

struct SelfPlayConfig {
  int max_plies = 100;
  double temperature = 1.0;  // softmax temperature over move scores
};

// Seeded games from a shallow material-greedy policy with softmax noise.
// Captures, checks and promotions score higher, so the move stream carries
// interaction structure a predictor can pick up. Used for the bundled sample
// corpus and for offline-free training subsets.
std::vector<PgnGame> selfplay_games(int n_games, uint64_t seed, const SelfPlayConfig& cfg = {});

}  // namespace vain::chess

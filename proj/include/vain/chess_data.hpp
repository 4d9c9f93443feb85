#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vain/chess.hpp"
#include "vain/frame.hpp"

namespace vain::chess {

struct PgnGame {
  std::vector<std::pair<std::string, std::string>> tags;
  std::vector<std::string> sans;
  std::string result;  // "1-0", "0-1", "1/2-1/2", "*"
};

struct PgnParseResult {
  std::vector<PgnGame> games;
  std::vector<std::string> errors;  // one diagnostic per discarded game
};

// Tolerant export-format parser: tag pairs, move numbers, {comments},
// ;line comments, $NAGs, nested (variations) skipped, result tokens.
// A malformed game is recorded in `errors` and parsing continues.
PgnParseResult parse_pgn(const std::string& text);

std::string write_pgn(const std::vector<PgnGame>& games);

// Next-moving-piece example: 32 fixed-identity slots, each (category, file,
// rank) with category 1..6 white PRNBQK, 7..12 black, 0 = captured/absent.
// Slot order: K Q Ra Rh Bc Bf Nb Ng P(a..h) for white (0..15), then black.
struct MppExample {
  std::array<std::array<int, 3>, 32> slots{};
  int label = -1;
};

constexpr int kMppSlots = 32;
constexpr int kMppFeatureDim = 29;  // 13 category one-hot + 8 file + 8 rank
constexpr int kMppAbsentBit = 12;

struct ReplayError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One example per position before each move, plies 1..max_ply. Throws
// ReplayError when a SAN token fails to resolve.
std::vector<MppExample> extract_examples(const PgnGame& game, int max_ply = 100);

// One-hot layout used both for the flat-input classifier and per-slot agent
// features: 13-way category (bit 12 = absent) ++ 8-way file ++ 8-way rank.
std::vector<double> encode_onehot(const MppExample& ex);

// 32-slot AgentFrame; absent slots masked out with zero features.
AgentFrame to_frame(const MppExample& ex);

}  // namespace vain::chess

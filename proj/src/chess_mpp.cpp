#include "vain/chess_data.hpp"

namespace vain::chess {

namespace {

// Category 1..6 = white P R N B Q K, 7..12 same for black.
int category_of(uint8_t piece) {
  int base;
  switch (type_of(piece)) {
    case Pawn: base = 1; break;
    case Rook: base = 2; break;
    case Knight: base = 3; break;
    case Bishop: base = 4; break;
    case Queen: base = 5; break;
    case King: base = 6; break;
    default: return 0;
  }
  return base + (color_of(piece) == Black ? 6 : 0);
}

// Initial square of each slot in canonical order.
std::array<int, 32> initial_slot_squares() {
  std::array<int, 32> sq{};
  auto fill = [&](int off, int rank, int pawn_rank) {
    sq[off + 0] = square(4, rank);  // K
    sq[off + 1] = square(3, rank);  // Q
    sq[off + 2] = square(0, rank);  // Ra
    sq[off + 3] = square(7, rank);  // Rh
    sq[off + 4] = square(2, rank);  // Bc
    sq[off + 5] = square(5, rank);  // Bf
    sq[off + 6] = square(1, rank);  // Nb
    sq[off + 7] = square(6, rank);  // Ng
    for (int f = 0; f < 8; ++f) sq[off + 8 + f] = square(f, pawn_rank);
  };
  fill(0, 0, 1);
  fill(16, 7, 6);
  return sq;
}

}  // namespace

std::vector<MppExample> extract_examples(const PgnGame& game, int max_ply) {
  std::vector<MppExample> out;
  Board board = Board::initial();

  // slot <-> square tracking; promoted pieces keep their slot.
  std::array<int, 64> slot_at;
  slot_at.fill(-1);
  std::array<int, 32> square_of = initial_slot_squares();
  for (int s = 0; s < 32; ++s) slot_at[square_of[s]] = s;

  int ply = 0;
  for (const std::string& san : game.sans) {
    ++ply;
    if (ply > max_ply) break;
    Move mv;
    try {
      mv = parse_san(board, san);
    } catch (const SanError& e) {
      throw ReplayError("ply " + std::to_string(ply) + ": " + e.what());
    }
    const int mover = slot_at[mv.from];
    if (mover < 0) throw ReplayError("ply " + std::to_string(ply) + ": untracked mover");

    MppExample ex;
    for (int s = 0; s < 32; ++s) {
      const int sq = square_of[s];
      if (sq < 0) continue;
      ex.slots[s] = {category_of(board.piece_at(sq)), file_of(sq), rank_of(sq)};
    }
    ex.label = mover;
    out.push_back(ex);

    // Update tracking alongside the board.
    if (mv.flags & EnPassant) {
      const int victim_sq = square(file_of(mv.to), rank_of(mv.from));
      const int victim = slot_at[victim_sq];
      if (victim >= 0) {
        square_of[victim] = -1;
        slot_at[victim_sq] = -1;
      }
    } else if (board.piece_at(mv.to) != 0) {
      const int victim = slot_at[mv.to];
      if (victim >= 0) square_of[victim] = -1;
    }
    slot_at[mv.from] = -1;
    slot_at[mv.to] = mover;
    square_of[mover] = mv.to;
    if (mv.flags & CastleKingside || mv.flags & CastleQueenside) {
      const int home = board.side_to_move == White ? 0 : 7;
      const int rfrom = square(mv.flags & CastleKingside ? 7 : 0, home);
      const int rto = square(mv.flags & CastleKingside ? 5 : 3, home);
      const int rook = slot_at[rfrom];
      slot_at[rfrom] = -1;
      slot_at[rto] = rook;
      if (rook >= 0) square_of[rook] = rto;
    }
    board = apply_move(board, mv);
  }
  return out;
}

std::vector<double> encode_onehot(const MppExample& ex) {
  std::vector<double> out(kMppSlots * kMppFeatureDim, 0.0);
  for (int s = 0; s < kMppSlots; ++s) {
    double* row = out.data() + s * kMppFeatureDim;
    const auto& [cat, x, y] = ex.slots[s];
    if (cat == 0) {
      row[kMppAbsentBit] = 1.0;
    } else {
      row[cat - 1] = 1.0;
      row[13 + x] = 1.0;
      row[21 + y] = 1.0;
    }
  }
  return out;
}

AgentFrame to_frame(const MppExample& ex) {
  AgentFrame f;
  f.features = Mat(kMppSlots, kMppFeatureDim);
  f.mask.assign(kMppSlots, 0);
  for (int s = 0; s < kMppSlots; ++s) {
    const auto& [cat, x, y] = ex.slots[s];
    if (cat == 0) continue;
    f.mask[s] = 1;
    f.features(s, cat - 1) = 1.0;
    f.features(s, 13 + x) = 1.0;
    f.features(s, 21 + y) = 1.0;
  }
  return f;
}

}  // namespace vain::chess

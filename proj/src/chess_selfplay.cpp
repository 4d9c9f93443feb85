#include "vain/chess_selfplay.hpp"

#include <cmath>

#include "vain/rng.hpp"

namespace vain::chess {

namespace {

double piece_value(PieceType t) {
  switch (t) {
    case Pawn: return 1.0;
    case Knight: return 3.0;
    case Bishop: return 3.0;
    case Rook: return 5.0;
    case Queen: return 9.0;
    default: return 0.0;
  }
}

double move_score(const Board& b, const Move& m) {
  double s = 0.0;
  if (b.piece_at(m.to) != 0) s += 1.5 * piece_value(type_of(b.piece_at(m.to)));
  if (m.flags & EnPassant) s += 1.5;
  if (m.promo == Queen) s += 6.0;
  // Losing the mover to a pawn-guarded square is discouraged a little.
  const Board next = apply_move(b, m);
  if (in_check(next, next.side_to_move)) s += 1.0;
  // Mild preference for central play early on.
  const int f = file_of(m.to), r = rank_of(m.to);
  if (b.fullmove_number <= 12) {
    s += 0.25 * (3.5 - std::abs(f - 3.5)) * 0.25 * (3.5 - std::abs(r - 3.5));
  }
  return s;
}

}  // namespace

std::vector<PgnGame> selfplay_games(int n_games, uint64_t seed, const SelfPlayConfig& cfg) {
  std::vector<PgnGame> out;
  out.reserve(n_games);
  Rng rng(seed);
  for (int g = 0; g < n_games; ++g) {
    Board board = Board::initial();
    PgnGame game;
    game.result = "*";
    for (int ply = 0; ply < cfg.max_plies; ++ply) {
      const std::vector<Move> moves = legal_moves(board);
      if (moves.empty()) {
        if (in_check(board, board.side_to_move)) {
          game.result = board.side_to_move == White ? "0-1" : "1-0";
        } else {
          game.result = "1/2-1/2";
        }
        break;
      }
      if (board.halfmove_clock >= 100) {
        game.result = "1/2-1/2";
        break;
      }
      std::vector<double> w(moves.size());
      double mx = -1e300;
      for (size_t i = 0; i < moves.size(); ++i) {
        w[i] = move_score(board, moves[i]) / cfg.temperature;
        mx = std::max(mx, w[i]);
      }
      double total = 0.0;
      for (double& x : w) total += (x = std::exp(x - mx));
      double pick = next_unit(rng) * total;
      size_t choice = 0;
      for (size_t i = 0; i < moves.size(); ++i) {
        pick -= w[i];
        if (pick <= 0.0) {
          choice = i;
          break;
        }
      }
      game.sans.push_back(to_san(board, moves[choice]));
      board = apply_move(board, moves[choice]);
    }
    game.tags = {{"Event", "Self-play sample"},
                 {"Site", "local"},
                 {"Round", std::to_string(g + 1)},
                 {"White", "policy"},
                 {"Black", "policy"},
                 {"Result", game.result}};
    out.push_back(std::move(game));
  }
  return out;
}

}  // namespace vain::chess

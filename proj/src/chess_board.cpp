#include "vain/chess.hpp"

#include <cctype>
#include <sstream>

namespace vain::chess {

namespace {

constexpr int kKnightSteps[8][2] = {{1, 2},  {2, 1},  {2, -1}, {1, -2},
                                    {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}};
constexpr int kKingSteps[8][2] = {{1, 0}, {1, 1},  {0, 1},  {-1, 1},
                                  {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
constexpr int kBishopDirs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
constexpr int kRookDirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

bool on_board(int file, int rank) { return file >= 0 && file < 8 && rank >= 0 && rank < 8; }

char piece_char(PieceType t) {
  switch (t) {
    case Pawn: return 'P';
    case Knight: return 'N';
    case Bishop: return 'B';
    case Rook: return 'R';
    case Queen: return 'Q';
    case King: return 'K';
    default: return '?';
  }
}

PieceType piece_from_char(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'P': return Pawn;
    case 'N': return Knight;
    case 'B': return Bishop;
    case 'R': return Rook;
    case 'Q': return Queen;
    case 'K': return King;
    default: return NoPiece;
  }
}

}  // namespace

std::string square_name(int sq) {
  std::string s;
  s += static_cast<char>('a' + file_of(sq));
  s += static_cast<char>('1' + rank_of(sq));
  return s;
}

Board Board::initial() {
  Board b;
  const PieceType back[8] = {Rook, Knight, Bishop, Queen, King, Bishop, Knight, Rook};
  for (int f = 0; f < 8; ++f) {
    b.sq[square(f, 0)] = make_piece(back[f], White);
    b.sq[square(f, 1)] = make_piece(Pawn, White);
    b.sq[square(f, 6)] = make_piece(Pawn, Black);
    b.sq[square(f, 7)] = make_piece(back[f], Black);
  }
  return b;
}

Board Board::from_fen(const std::string& fen) {
  Board b;
  b.castling = 0;
  std::istringstream in(fen);
  std::string placement, stm, castle, ep;
  if (!(in >> placement >> stm >> castle >> ep)) throw std::invalid_argument("bad FEN: " + fen);
  in >> b.halfmove_clock >> b.fullmove_number;
  int file = 0, rank = 7;
  for (char c : placement) {
    if (c == '/') {
      file = 0;
      --rank;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      file += c - '0';
    } else {
      const PieceType t = piece_from_char(c);
      if (t == NoPiece || !on_board(file, rank)) throw std::invalid_argument("bad FEN: " + fen);
      b.sq[square(file, rank)] = make_piece(t, std::isupper(static_cast<unsigned char>(c)) ? White : Black);
      ++file;
    }
  }
  b.side_to_move = (stm == "w") ? White : Black;
  for (char c : castle) {
    if (c == 'K') b.castling |= WhiteKing;
    if (c == 'Q') b.castling |= WhiteQueen;
    if (c == 'k') b.castling |= BlackKing;
    if (c == 'q') b.castling |= BlackQueen;
  }
  if (ep != "-" && ep.size() == 2) b.ep_square = square(ep[0] - 'a', ep[1] - '1');
  return b;
}

std::string Board::to_fen() const {
  std::string out;
  for (int rank = 7; rank >= 0; --rank) {
    int empty = 0;
    for (int file = 0; file < 8; ++file) {
      const uint8_t p = sq[square(file, rank)];
      if (!p) {
        ++empty;
        continue;
      }
      if (empty) {
        out += static_cast<char>('0' + empty);
        empty = 0;
      }
      char c = piece_char(type_of(p));
      out += color_of(p) == White ? c : static_cast<char>(std::tolower(c));
    }
    if (empty) out += static_cast<char>('0' + empty);
    if (rank) out += '/';
  }
  out += side_to_move == White ? " w " : " b ";
  if (!castling) {
    out += '-';
  } else {
    if (castling & WhiteKing) out += 'K';
    if (castling & WhiteQueen) out += 'Q';
    if (castling & BlackKing) out += 'k';
    if (castling & BlackQueen) out += 'q';
  }
  out += ' ';
  out += ep_square >= 0 ? square_name(ep_square) : "-";
  out += ' ' + std::to_string(halfmove_clock) + ' ' + std::to_string(fullmove_number);
  return out;
}

int Board::king_square(Color c) const {
  const uint8_t k = make_piece(King, c);
  for (int s = 0; s < 64; ++s) {
    if (sq[s] == k) return s;
  }
  throw std::logic_error("board without a " + std::string(c == White ? "white" : "black") + " king");
}

bool square_attacked(const Board& b, int s, Color by) {
  const int f = file_of(s), r = rank_of(s);
  // Pawns attack toward their forward direction.
  const int pr = by == White ? r - 1 : r + 1;
  for (int df : {-1, 1}) {
    if (on_board(f + df, pr) && b.sq[square(f + df, pr)] == make_piece(Pawn, by)) return true;
  }
  for (const auto& st : kKnightSteps) {
    if (on_board(f + st[0], r + st[1]) && b.sq[square(f + st[0], r + st[1])] == make_piece(Knight, by)) {
      return true;
    }
  }
  for (const auto& st : kKingSteps) {
    if (on_board(f + st[0], r + st[1]) && b.sq[square(f + st[0], r + st[1])] == make_piece(King, by)) {
      return true;
    }
  }
  for (const auto& d : kBishopDirs) {
    for (int k = 1;; ++k) {
      const int nf = f + d[0] * k, nr = r + d[1] * k;
      if (!on_board(nf, nr)) break;
      const uint8_t p = b.sq[square(nf, nr)];
      if (!p) continue;
      if (color_of(p) == by && (type_of(p) == Bishop || type_of(p) == Queen)) return true;
      break;
    }
  }
  for (const auto& d : kRookDirs) {
    for (int k = 1;; ++k) {
      const int nf = f + d[0] * k, nr = r + d[1] * k;
      if (!on_board(nf, nr)) break;
      const uint8_t p = b.sq[square(nf, nr)];
      if (!p) continue;
      if (color_of(p) == by && (type_of(p) == Rook || type_of(p) == Queen)) return true;
      break;
    }
  }
  return false;
}

bool in_check(const Board& b, Color c) {
  return square_attacked(b, b.king_square(c), c == White ? Black : White);
}

namespace {

void push_pawn_moves(std::vector<Move>& out, int from, int to, uint8_t flags, Color us) {
  const int last = us == White ? 7 : 0;
  if (rank_of(to) == last) {
    for (PieceType promo : {Queen, Rook, Bishop, Knight}) {
      out.push_back({static_cast<uint8_t>(from), static_cast<uint8_t>(to), promo, flags});
    }
  } else {
    out.push_back({static_cast<uint8_t>(from), static_cast<uint8_t>(to), NoPiece, flags});
  }
}

std::vector<Move> pseudo_moves(const Board& b) {
  std::vector<Move> out;
  out.reserve(48);
  const Color us = b.side_to_move;
  const Color them = us == White ? Black : White;
  const int fwd = us == White ? 1 : -1;
  for (int s = 0; s < 64; ++s) {
    const uint8_t p = b.sq[s];
    if (!p || color_of(p) != us) continue;
    const int f = file_of(s), r = rank_of(s);
    switch (type_of(p)) {
      case Pawn: {
        const int r1 = r + fwd;
        if (on_board(f, r1) && !b.sq[square(f, r1)]) {
          push_pawn_moves(out, s, square(f, r1), QuietMove, us);
          const int home = us == White ? 1 : 6;
          if (r == home && !b.sq[square(f, r + 2 * fwd)]) {
            out.push_back({static_cast<uint8_t>(s), static_cast<uint8_t>(square(f, r + 2 * fwd)),
                           NoPiece, DoublePush});
          }
        }
        for (int df : {-1, 1}) {
          if (!on_board(f + df, r1)) continue;
          const int t = square(f + df, r1);
          const uint8_t q = b.sq[t];
          if (q && color_of(q) == them) {
            push_pawn_moves(out, s, t, QuietMove, us);
          } else if (t == b.ep_square) {
            out.push_back({static_cast<uint8_t>(s), static_cast<uint8_t>(t), NoPiece, EnPassant});
          }
        }
        break;
      }
      case Knight:
        for (const auto& st : kKnightSteps) {
          if (!on_board(f + st[0], r + st[1])) continue;
          const int t = square(f + st[0], r + st[1]);
          if (!b.sq[t] || color_of(b.sq[t]) == them) {
            out.push_back({static_cast<uint8_t>(s), static_cast<uint8_t>(t), NoPiece, QuietMove});
          }
        }
        break;
      case King:
        for (const auto& st : kKingSteps) {
          if (!on_board(f + st[0], r + st[1])) continue;
          const int t = square(f + st[0], r + st[1]);
          if (!b.sq[t] || color_of(b.sq[t]) == them) {
            out.push_back({static_cast<uint8_t>(s), static_cast<uint8_t>(t), NoPiece, QuietMove});
          }
        }
        break;
      case Bishop:
      case Rook:
      case Queen: {
        const PieceType t = type_of(p);
        auto slide = [&](const int dirs[][2], int ndirs) {
          for (int d = 0; d < ndirs; ++d) {
            for (int k = 1;; ++k) {
              const int nf = f + dirs[d][0] * k, nr = r + dirs[d][1] * k;
              if (!on_board(nf, nr)) break;
              const int tsq = square(nf, nr);
              const uint8_t q = b.sq[tsq];
              if (!q) {
                out.push_back({static_cast<uint8_t>(s), static_cast<uint8_t>(tsq), NoPiece, QuietMove});
                continue;
              }
              if (color_of(q) == them) {
                out.push_back({static_cast<uint8_t>(s), static_cast<uint8_t>(tsq), NoPiece, QuietMove});
              }
              break;
            }
          }
        };
        if (t == Bishop || t == Queen) slide(kBishopDirs, 4);
        if (t == Rook || t == Queen) slide(kRookDirs, 4);
        break;
      }
      default:
        break;
    }
  }
  // Castling: rights present, lane empty, king path unattacked.
  const int home = us == White ? 0 : 7;
  const int ks = square(4, home);
  if (b.sq[ks] == make_piece(King, us) && !square_attacked(b, ks, them)) {
    const uint8_t kr = us == White ? WhiteKing : BlackKing;
    const uint8_t qr = us == White ? WhiteQueen : BlackQueen;
    if ((b.castling & kr) && b.sq[square(7, home)] == make_piece(Rook, us) &&
        !b.sq[square(5, home)] && !b.sq[square(6, home)] &&
        !square_attacked(b, square(5, home), them) && !square_attacked(b, square(6, home), them)) {
      out.push_back({static_cast<uint8_t>(ks), static_cast<uint8_t>(square(6, home)), NoPiece,
                     CastleKingside});
    }
    if ((b.castling & qr) && b.sq[square(0, home)] == make_piece(Rook, us) &&
        !b.sq[square(1, home)] && !b.sq[square(2, home)] && !b.sq[square(3, home)] &&
        !square_attacked(b, square(3, home), them) && !square_attacked(b, square(2, home), them)) {
      out.push_back({static_cast<uint8_t>(ks), static_cast<uint8_t>(square(2, home)), NoPiece,
                     CastleQueenside});
    }
  }
  return out;
}

}  // namespace

std::vector<Move> legal_moves(const Board& b) {
  std::vector<Move> out;
  for (const Move& m : pseudo_moves(b)) {
    const Board next = apply_move(b, m);
    if (!in_check(next, b.side_to_move)) out.push_back(m);
  }
  return out;
}

Board apply_move(const Board& b, const Move& m) {
  Board n = b;
  const Color us = b.side_to_move;
  const uint8_t moving = b.sq[m.from];
  const bool capture = b.sq[m.to] != 0 || (m.flags & EnPassant);
  n.sq[m.from] = 0;
  n.sq[m.to] = m.promo != NoPiece ? make_piece(static_cast<PieceType>(m.promo), us) : moving;
  if (m.flags & EnPassant) {
    n.sq[square(file_of(m.to), rank_of(m.from))] = 0;
  }
  const int home = us == White ? 0 : 7;
  if (m.flags & CastleKingside) {
    n.sq[square(5, home)] = n.sq[square(7, home)];
    n.sq[square(7, home)] = 0;
  } else if (m.flags & CastleQueenside) {
    n.sq[square(3, home)] = n.sq[square(0, home)];
    n.sq[square(0, home)] = 0;
  }
  // Rights drop when the king or a corner rook moves, or a corner rook dies.
  auto drop_right = [&](int sq_at, uint8_t right) {
    if (m.from == sq_at || m.to == sq_at) n.castling &= static_cast<uint8_t>(~right);
  };
  if (type_of(moving) == King) {
    n.castling &= static_cast<uint8_t>(~(us == White ? (WhiteKing | WhiteQueen) : (BlackKing | BlackQueen)));
  }
  drop_right(square(0, 0), WhiteQueen);
  drop_right(square(7, 0), WhiteKing);
  drop_right(square(0, 7), BlackQueen);
  drop_right(square(7, 7), BlackKing);
  n.ep_square = (m.flags & DoublePush) ? square(file_of(m.from), (rank_of(m.from) + rank_of(m.to)) / 2)
                                       : -1;
  n.halfmove_clock = (type_of(moving) == Pawn || capture) ? 0 : b.halfmove_clock + 1;
  n.side_to_move = us == White ? Black : White;
  if (us == Black) ++n.fullmove_number;
  ++n.ply;
  return n;
}

bool is_capture(const Board& b, const Move& m) {
  return b.sq[m.to] != 0 || (m.flags & EnPassant);
}

bool is_checkmate(const Board& b) {
  return legal_moves(b).empty() && in_check(b, b.side_to_move);
}

bool is_stalemate(const Board& b) {
  return legal_moves(b).empty() && !in_check(b, b.side_to_move);
}

uint64_t perft(const Board& b, int depth) {
  if (depth == 0) return 1;
  uint64_t total = 0;
  for (const Move& m : legal_moves(b)) {
    total += perft(apply_move(b, m), depth - 1);
  }
  return total;
}

}  // namespace vain::chess

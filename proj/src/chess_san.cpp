#include <algorithm>
#include <cctype>

#include "vain/chess.hpp"

namespace vain::chess {

namespace {

PieceType promo_from_char(char c) {
  switch (c) {
    case 'N': return Knight;
    case 'B': return Bishop;
    case 'R': return Rook;
    case 'Q': return Queen;
    default: return NoPiece;
  }
}

char piece_letter(PieceType t) {
  switch (t) {
    case Knight: return 'N';
    case Bishop: return 'B';
    case Rook: return 'R';
    case Queen: return 'Q';
    case King: return 'K';
    default: return 0;
  }
}

std::string strip_decorations(std::string san) {
  // Trailing check/mate/annotation marks and an optional "e.p." tag carry no
  // information needed for resolution.
  const auto ep = san.find("e.p.");
  if (ep != std::string::npos) san.erase(ep, 4);
  while (!san.empty()) {
    const char c = san.back();
    if (c == '+' || c == '#' || c == '!' || c == '?') {
      san.pop_back();
    } else {
      break;
    }
  }
  return san;
}

}  // namespace

Move parse_san(const Board& b, const std::string& raw) {
  const std::string san = strip_decorations(raw);
  if (san.empty()) throw SanError("empty SAN token");
  const std::vector<Move> legal = legal_moves(b);

  if (san == "O-O" || san == "0-0") {
    for (const Move& m : legal) {
      if (m.flags & CastleKingside) return m;
    }
    throw SanError("illegal castle: " + raw);
  }
  if (san == "O-O-O" || san == "0-0-0") {
    for (const Move& m : legal) {
      if (m.flags & CastleQueenside) return m;
    }
    throw SanError("illegal castle: " + raw);
  }

  PieceType piece = Pawn;
  size_t pos = 0;
  if (std::isupper(static_cast<unsigned char>(san[0]))) {
    piece = san[0] == 'K' ? King : promo_from_char(san[0]);
    if (piece == NoPiece) throw SanError("bad piece letter: " + raw);
    pos = 1;
  }

  PieceType promo = NoPiece;
  std::string body = san.substr(pos);
  const auto eq = body.find('=');
  if (eq != std::string::npos) {
    if (eq + 1 >= body.size()) throw SanError("bad promotion: " + raw);
    promo = promo_from_char(body[eq + 1]);
    if (promo == NoPiece) throw SanError("bad promotion: " + raw);
    body.erase(eq);
  }
  body.erase(std::remove(body.begin(), body.end(), 'x'), body.end());

  if (body.size() < 2) throw SanError("bad SAN: " + raw);
  const char tf = body[body.size() - 2], tr = body[body.size() - 1];
  if (tf < 'a' || tf > 'h' || tr < '1' || tr > '8') throw SanError("bad target square: " + raw);
  const int target = square(tf - 'a', tr - '1');

  int from_file = -1, from_rank = -1;
  for (size_t i = 0; i + 2 < body.size(); ++i) {
    const char c = body[i];
    if (c >= 'a' && c <= 'h') {
      from_file = c - 'a';
    } else if (c >= '1' && c <= '8') {
      from_rank = c - '1';
    } else {
      throw SanError("bad disambiguation: " + raw);
    }
  }

  const Move* found = nullptr;
  int matches = 0;
  for (const Move& m : legal) {
    if (m.to != target) continue;
    if (type_of(b.piece_at(m.from)) != piece) continue;
    if (static_cast<PieceType>(m.promo) != promo) continue;
    if (from_file >= 0 && file_of(m.from) != from_file) continue;
    if (from_rank >= 0 && rank_of(m.from) != from_rank) continue;
    found = &m;
    ++matches;
  }
  if (matches == 0) throw SanError("illegal move: " + raw);
  if (matches > 1) throw SanError("ambiguous move: " + raw);
  return *found;
}

std::string to_san(const Board& b, const Move& m) {
  std::string out;
  if (m.flags & CastleKingside) {
    out = "O-O";
  } else if (m.flags & CastleQueenside) {
    out = "O-O-O";
  } else {
    const PieceType piece = type_of(b.piece_at(m.from));
    const bool capture = is_capture(b, m);
    if (piece == Pawn) {
      if (capture) {
        out += static_cast<char>('a' + file_of(m.from));
        out += 'x';
      }
    } else {
      out += piece_letter(piece);
      // Disambiguate against other same-type pieces that can reach the target.
      bool need_file = false, need_rank = false, clash = false;
      for (const Move& o : legal_moves(b)) {
        if (o.to != m.to || o.from == m.from) continue;
        if (type_of(b.piece_at(o.from)) != piece) continue;
        clash = true;
        if (file_of(o.from) == file_of(m.from)) need_rank = true;
        if (rank_of(o.from) == rank_of(m.from)) need_file = true;
      }
      if (clash && !need_file && !need_rank) need_file = true;
      if (need_file) out += static_cast<char>('a' + file_of(m.from));
      if (need_rank) out += static_cast<char>('1' + rank_of(m.from));
      if (capture) out += 'x';
    }
    out += square_name(m.to);
    if (m.promo != NoPiece) {
      out += '=';
      out += piece_letter(static_cast<PieceType>(m.promo));
    }
  }
  const Board next = apply_move(b, m);
  if (in_check(next, next.side_to_move)) {
    out += legal_moves(next).empty() ? '#' : '+';
  }
  return out;
}

}  // namespace vain::chess

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vain::chess {

enum Color : uint8_t { White = 0, Black = 1 };

// Piece nibble: bits 0..2 type (1..6 = P N B R Q K), bit 3 color.
enum PieceType : uint8_t { NoPiece = 0, Pawn = 1, Knight, Bishop, Rook, Queen, King };

constexpr uint8_t make_piece(PieceType t, Color c) { return static_cast<uint8_t>(t | (c << 3)); }
constexpr PieceType type_of(uint8_t p) { return static_cast<PieceType>(p & 7); }
constexpr Color color_of(uint8_t p) { return static_cast<Color>((p >> 3) & 1); }

constexpr int square(int file, int rank) { return rank * 8 + file; }
constexpr int file_of(int sq) { return sq & 7; }
constexpr int rank_of(int sq) { return sq >> 3; }
std::string square_name(int sq);

enum MoveFlags : uint8_t {
  QuietMove = 0,
  DoublePush = 1,
  EnPassant = 2,
  CastleKingside = 4,
  CastleQueenside = 8,
};

struct Move {
  uint8_t from = 0;
  uint8_t to = 0;
  uint8_t promo = NoPiece;  // piece type when promoting
  uint8_t flags = QuietMove;

  bool operator==(const Move&) const = default;
};

// Castling rights bits.
enum CastleRight : uint8_t { WhiteKing = 1, WhiteQueen = 2, BlackKing = 4, BlackQueen = 8 };

struct Board {
  std::array<uint8_t, 64> sq{};
  Color side_to_move = White;
  uint8_t castling = WhiteKing | WhiteQueen | BlackKing | BlackQueen;
  int ep_square = -1;  // capture target behind a double push, else -1
  int halfmove_clock = 0;
  int fullmove_number = 1;
  int ply = 0;

  static Board initial();
  static Board from_fen(const std::string& fen);
  std::string to_fen() const;

  uint8_t piece_at(int s) const { return sq[s]; }
  int king_square(Color c) const;
};

bool square_attacked(const Board& b, int s, Color by);
bool in_check(const Board& b, Color c);

std::vector<Move> legal_moves(const Board& b);
Board apply_move(const Board& b, const Move& m);

bool is_capture(const Board& b, const Move& m);
bool is_checkmate(const Board& b);
bool is_stalemate(const Board& b);

uint64_t perft(const Board& b, int depth);

struct SanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Resolves a SAN token against the legal moves of the position. Throws
// SanError when the token is malformed, illegal, or ambiguous.
Move parse_san(const Board& b, const std::string& san);

// Minimal SAN with by-the-book disambiguation and +/# suffixes.
std::string to_san(const Board& b, const Move& m);

}  // namespace vain::chess

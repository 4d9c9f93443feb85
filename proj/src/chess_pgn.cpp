#include <cctype>
#include <sstream>

#include "vain/chess_data.hpp"

namespace vain::chess {

namespace {

bool is_result(const std::string& tok) {
  return tok == "1-0" || tok == "0-1" || tok == "1/2-1/2" || tok == "*";
}

struct Cursor {
  const std::string& text;
  size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void skip_ws() {
    while (!done() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
};

// [Key "Value"] with \" escapes.
std::pair<std::string, std::string> parse_tag(Cursor& c) {
  ++c.pos;  // '['
  c.skip_ws();
  std::string key;
  while (!c.done() && !std::isspace(static_cast<unsigned char>(c.peek())) && c.peek() != '"') {
    key += c.text[c.pos++];
  }
  c.skip_ws();
  if (c.done() || c.peek() != '"') throw std::runtime_error("tag without value: " + key);
  ++c.pos;
  std::string value;
  while (!c.done() && c.peek() != '"') {
    if (c.peek() == '\n') throw std::runtime_error("unterminated tag value: " + key);
    if (c.peek() == '\\' && c.pos + 1 < c.text.size()) ++c.pos;
    value += c.text[c.pos++];
  }
  if (c.done()) throw std::runtime_error("unterminated tag value: " + key);
  ++c.pos;  // '"'
  c.skip_ws();
  if (c.done() || c.peek() != ']') throw std::runtime_error("unterminated tag: " + key);
  ++c.pos;
  return {key, value};
}

void skip_comment(Cursor& c) {
  ++c.pos;  // '{'
  while (!c.done() && c.peek() != '}') ++c.pos;
  if (!c.done()) ++c.pos;
}

void skip_line(Cursor& c) {
  while (!c.done() && c.peek() != '\n') ++c.pos;
}

void skip_variation(Cursor& c) {
  int depth = 0;
  while (!c.done()) {
    const char ch = c.text[c.pos++];
    if (ch == '(') ++depth;
    if (ch == ')' && --depth == 0) return;
    if (ch == '{') {
      while (!c.done() && c.peek() != '}') ++c.pos;
    }
  }
}

std::string next_word(Cursor& c) {
  std::string tok;
  while (!c.done()) {
    const char ch = c.peek();
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == '{' || ch == ';' || ch == '(' ||
        ch == ')' || ch == '[') {
      break;
    }
    tok += ch;
    ++c.pos;
  }
  return tok;
}

bool looks_like_move_number(const std::string& tok) {
  size_t i = 0;
  while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) ++i;
  if (i == 0) return false;
  while (i < tok.size() && tok[i] == '.') ++i;
  return i == tok.size();
}

}  // namespace

PgnParseResult parse_pgn(const std::string& text) {
  PgnParseResult out;
  Cursor c{text};
  PgnGame game;
  bool in_game = false;
  bool in_movetext = false;

  auto flush = [&](const char* why) {
    if (!in_game) return;
    if (game.result.empty()) {
      if (game.sans.empty() && game.tags.empty()) {
        // nothing collected, not a game
      } else if (game.sans.empty()) {
        out.errors.push_back(std::string("game without moves (") + why + ")");
      } else {
        game.result = "*";
        out.games.push_back(std::move(game));
      }
    } else {
      out.games.push_back(std::move(game));
    }
    game = PgnGame{};
    in_game = in_movetext = false;
  };

  while (true) {
    c.skip_ws();
    if (c.done()) break;
    const char ch = c.peek();
    try {
      if (ch == '[') {
        if (in_movetext) flush("new tag section");
        auto tag = parse_tag(c);
        in_game = true;
        game.tags.push_back(std::move(tag));
        continue;
      }
      if (ch == '{') {
        skip_comment(c);
        continue;
      }
      if (ch == ';') {
        skip_line(c);
        continue;
      }
      if (ch == '(') {
        skip_variation(c);
        continue;
      }
      if (ch == ')') {
        ++c.pos;  // stray close, ignore
        continue;
      }
      const std::string tok = next_word(c);
      if (tok.empty()) {
        ++c.pos;
        continue;
      }
      in_game = true;
      if (is_result(tok)) {
        game.result = tok;
        out.games.push_back(std::move(game));
        game = PgnGame{};
        in_game = in_movetext = false;
        continue;
      }
      if (tok[0] == '$' || looks_like_move_number(tok)) {
        in_movetext = true;
        continue;
      }
      // Move numbers glued to the move ("1.e4") show up in some exports.
      std::string san = tok;
      size_t d = 0;
      while (d < san.size() && std::isdigit(static_cast<unsigned char>(san[d]))) ++d;
      if (d > 0 && d < san.size() && san[d] == '.') {
        while (d < san.size() && san[d] == '.') ++d;
        san = san.substr(d);
        if (san.empty()) continue;
      }
      in_movetext = true;
      game.sans.push_back(san);
    } catch (const std::exception& e) {
      out.errors.push_back(e.what());
      // Resync: skip to the next tag section start.
      while (!c.done() && c.peek() != '[') ++c.pos;
      game = PgnGame{};
      in_game = in_movetext = false;
    }
  }
  flush("end of input");
  return out;
}

std::string write_pgn(const std::vector<PgnGame>& games) {
  std::ostringstream out;
  for (const PgnGame& g : games) {
    for (const auto& [k, v] : g.tags) out << '[' << k << " \"" << v << "\"]\n";
    out << '\n';
    int ply = 0;
    size_t col = 0;
    for (const std::string& san : g.sans) {
      std::string tok;
      if (ply % 2 == 0) tok = std::to_string(ply / 2 + 1) + ". " + san;
      else tok = san;
      if (col + tok.size() + 1 > 80) {
        out << '\n';
        col = 0;
      } else if (col > 0) {
        out << ' ';
        ++col;
      }
      out << tok;
      col += tok.size();
      ++ply;
    }
    if (col > 0) out << ' ';
    out << (g.result.empty() ? "*" : g.result) << "\n\n";
  }
  return out.str();
}

}  // namespace vain::chess

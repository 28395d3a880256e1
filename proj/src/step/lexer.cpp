#include "stepgraph/step/lexer.hpp"

#include <cctype>
#include <cstdlib>

namespace stepgraph::step {

const char* token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Keyword: return "Keyword";
    case TokenKind::Integer: return "Integer";
    case TokenKind::Real: return "Real";
    case TokenKind::String: return "String";
    case TokenKind::EnumValue: return "EnumValue";
    case TokenKind::Reference: return "Reference";
    case TokenKind::LParen: return "LParen";
    case TokenKind::RParen: return "RParen";
    case TokenKind::Comma: return "Comma";
    case TokenKind::Semicolon: return "Semicolon";
    case TokenKind::Equals: return "Equals";
    case TokenKind::Dollar: return "Dollar";
    case TokenKind::Star: return "Star";
    case TokenKind::EndOfInput: return "EndOfInput";
  }
  return "Unknown";
}

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool eof() const { return i_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0';
  }
  char advance() {
    const char c = text_[i_++];
    if (c == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    return c;
  }
  SourcePos pos() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t i_ = 0;
  SourcePos pos_{};
};

bool is_keyword_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

bool is_keyword_char(char c) {
  return is_keyword_start(c) || (c >= '0' && c <= '9');
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::vector<Token> tokenize(std::string_view input) {
  std::vector<Token> tokens;
  Cursor cur(input);

  auto push = [&tokens](TokenKind kind, SourcePos pos, std::string text = {},
                        double number = 0.0, long long id = 0) {
    tokens.push_back(Token{kind, std::move(text), number, id, pos});
  };

  while (!cur.eof()) {
    const SourcePos pos = cur.pos();
    const char c = cur.peek();

    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
        c == '\v') {
      cur.advance();
      continue;
    }

    if (c == '/' && cur.peek(1) == '*') {
      cur.advance();
      cur.advance();
      bool closed = false;
      while (!cur.eof()) {
        if (cur.peek() == '*' && cur.peek(1) == '/') {
          cur.advance();
          cur.advance();
          closed = true;
          break;
        }
        cur.advance();
      }
      if (!closed)
        throw Error(ErrorCode::UnterminatedComment, "comment opened here", pos);
      continue;
    }

    if (c == '\'') {
      cur.advance();
      std::string content;
      bool closed = false;
      while (!cur.eof()) {
        const char s = cur.advance();
        if (s == '\'') {
          if (cur.peek() == '\'') {  // '' is an embedded quote
            content.push_back('\'');
            cur.advance();
          } else {
            closed = true;
            break;
          }
        } else {
          content.push_back(s);
        }
      }
      if (!closed)
        throw Error(ErrorCode::UnterminatedString, "string opened here", pos);
      push(TokenKind::String, pos, std::move(content));
      continue;
    }

    if (c == '#') {
      cur.advance();
      if (!is_digit(cur.peek()))
        throw Error(ErrorCode::IllegalCharacter, "expected digits after '#'",
                    pos);
      long long id = 0;
      while (is_digit(cur.peek())) id = id * 10 + (cur.advance() - '0');
      push(TokenKind::Reference, pos, {}, 0.0, id);
      continue;
    }

    if (c == '.') {
      // enumeration literal .NAME.
      cur.advance();
      std::string text = ".";
      while (is_keyword_char(cur.peek())) text.push_back(cur.advance());
      if (cur.peek() != '.' || text.size() == 1)
        throw Error(ErrorCode::IllegalCharacter, "malformed enumeration literal",
                    pos);
      cur.advance();
      text.push_back('.');
      push(TokenKind::EnumValue, pos, std::move(text));
      continue;
    }

    if (is_digit(c) || ((c == '+' || c == '-') && is_digit(cur.peek(1)))) {
      std::string text;
      bool is_real = false;
      if (c == '+' || c == '-') text.push_back(cur.advance());
      while (is_digit(cur.peek())) text.push_back(cur.advance());
      if (cur.peek() == '.') {
        is_real = true;
        text.push_back(cur.advance());
        while (is_digit(cur.peek())) text.push_back(cur.advance());
      }
      if (cur.peek() == 'E' || cur.peek() == 'e') {
        const char sign = cur.peek(1);
        if (is_digit(sign) ||
            ((sign == '+' || sign == '-') && is_digit(cur.peek(2)))) {
          is_real = true;
          text.push_back(cur.advance());
          if (cur.peek() == '+' || cur.peek() == '-')
            text.push_back(cur.advance());
          while (is_digit(cur.peek())) text.push_back(cur.advance());
        }
      }
      const double value = std::strtod(text.c_str(), nullptr);
      push(is_real ? TokenKind::Real : TokenKind::Integer, pos, std::move(text),
           value);
      continue;
    }

    if (is_keyword_start(c)) {
      std::string text;
      text.push_back(cur.advance());
      while (is_keyword_char(cur.peek())) text.push_back(cur.advance());
      // Section sentinels like ISO-10303-21 and END-ISO-10303-21 embed
      // hyphens; extend only when a hyphen is followed by a keyword char.
      while (cur.peek() == '-' && is_keyword_char(cur.peek(1))) {
        text.push_back(cur.advance());
        while (is_keyword_char(cur.peek())) text.push_back(cur.advance());
      }
      push(TokenKind::Keyword, pos, std::move(text));
      continue;
    }

    switch (c) {
      case '(': cur.advance(); push(TokenKind::LParen, pos); continue;
      case ')': cur.advance(); push(TokenKind::RParen, pos); continue;
      case ',': cur.advance(); push(TokenKind::Comma, pos); continue;
      case ';': cur.advance(); push(TokenKind::Semicolon, pos); continue;
      case '=': cur.advance(); push(TokenKind::Equals, pos); continue;
      case '$': cur.advance(); push(TokenKind::Dollar, pos); continue;
      case '*': cur.advance(); push(TokenKind::Star, pos); continue;
      default:
        throw Error(ErrorCode::IllegalCharacter,
                    "unexpected character '" + std::string(1, c) + "'", pos);
    }
  }

  return tokens;
}

}  // namespace stepgraph::step

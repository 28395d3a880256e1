#pragma once

#include <string>
#include <vector>

#include "stepgraph/error.hpp"

namespace stepgraph::step {

enum class TokenKind {
  Keyword,     // FILE_NAME, PRODUCT, ISO-10303-21, ...
  Integer,     // 2003
  Real,        // 1.5E-3
  String,      // 'demo' (content with '' collapsed)
  EnumValue,   // .T. (text kept with dots)
  Reference,   // #10
  LParen,
  RParen,
  Comma,
  Semicolon,
  Equals,
  Dollar,
  Star,
  EndOfInput,
};

const char* token_kind_name(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::EndOfInput;
  std::string text;      // raw text for keywords/numbers/enums, content for strings
  double number = 0.0;   // parsed value for Integer/Real
  long long id = 0;      // target for Reference
  SourcePos pos;
};

}  // namespace stepgraph::step

#pragma once

#include <string_view>
#include <vector>

#include "stepgraph/step/token.hpp"

namespace stepgraph::step {

/// Tokenizes ISO 10303-21 clear text. Comments are skipped; every token
/// carries its 1-based line/column. Throws Error with code
/// UnterminatedString, UnterminatedComment or IllegalCharacter.
std::vector<Token> tokenize(std::string_view input);

}  // namespace stepgraph::step

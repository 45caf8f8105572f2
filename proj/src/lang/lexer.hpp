#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rwl/common/expected.hpp"
#include "rwl/lang/program.hpp"

namespace rwl::lang::detail {

enum class TokenKind {
  Number, Identifier, Plus, Minus, Star, Slash, LParen, RParen, Comma, Assign,
  Less, LessEqual, Greater, GreaterEqual, EqualEqual, Newline, End
};

struct Token {
  TokenKind kind;
  std::string_view text;
  double number = 0.0;
  SourceSpan span;
};

std::string_view describe(TokenKind kind);

/// Splits source into tokens. Comments are dropped; newlines are kept as
/// separators. The final token is always End.
Expected<std::vector<Token>, RewardLangError> tokenize(std::string_view source);

RewardLangError make_error(ErrorKind kind, SourceSpan at, std::string_view what);

}  // namespace rwl::lang::detail

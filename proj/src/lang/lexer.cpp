#include "lexer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

namespace rwl::lang::detail {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

}  // namespace

std::string_view describe(TokenKind kind) {
  switch (kind) {
    case TokenKind::Number: return "number";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Comma: return "','";
    case TokenKind::Assign: return "'='";
    case TokenKind::Less: return "'<'";
    case TokenKind::LessEqual: return "'<='";
    case TokenKind::Greater: return "'>'";
    case TokenKind::GreaterEqual: return "'>='";
    case TokenKind::EqualEqual: return "'=='";
    case TokenKind::Newline: return "end of line";
    case TokenKind::End: return "end of input";
  }
  return "token";
}

RewardLangError make_error(ErrorKind kind, SourceSpan at, std::string_view what) {
  RewardLangError err;
  err.kind = kind;
  err.span = at;
  const std::string_view label = kind == ErrorKind::Arity ? "arity error" : "parse error";
  err.message = fmt::format("{} at line {}, column {}: {}", label, at.line, at.column, what);
  return err;
}

Expected<std::vector<Token>, RewardLangError> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  int line = 1;
  std::size_t line_start = 0;
  std::size_t i = 0;
  auto span_at = [&](std::size_t pos) {
    return SourceSpan{line, static_cast<int>(pos - line_start) + 1};
  };
  auto push = [&](TokenKind kind, std::size_t begin, std::size_t len) {
    tokens.push_back(Token{kind, source.substr(begin, len), 0.0, span_at(begin)});
  };

  while (i < source.size()) {
    const char c = source[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < source.size() && source[i] != '\n') ++i;
      continue;
    }
    if (c == '\n') {
      push(TokenKind::Newline, i, 1);
      ++i;
      ++line;
      line_start = i;
      continue;
    }
    if (is_digit(c)) {
      const std::size_t begin = i;
      while (i < source.size() && is_digit(source[i])) ++i;
      bool malformed = false;
      if (i < source.size() && source[i] == '.') {
        ++i;
        if (i >= source.size() || !is_digit(source[i])) malformed = true;
        while (i < source.size() && is_digit(source[i])) ++i;
      }
      if (!malformed && i < source.size() && (source[i] == 'e' || source[i] == 'E')) {
        ++i;
        if (i < source.size() && (source[i] == '+' || source[i] == '-')) ++i;
        if (i >= source.size() || !is_digit(source[i])) malformed = true;
        while (i < source.size() && is_digit(source[i])) ++i;
      }
      if (malformed || (i < source.size() && is_ident_char(source[i]))) {
        return unexpected(make_error(ErrorKind::Parse, span_at(begin), "malformed number literal"));
      }
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(source.data() + begin, source.data() + i, value);
      if (ec != std::errc{} || !std::isfinite(value)) {
        return unexpected(make_error(ErrorKind::Parse, span_at(begin), "number literal out of range"));
      }
      (void)ptr;
      tokens.push_back(Token{TokenKind::Number, source.substr(begin, i - begin), value, span_at(begin)});
      continue;
    }
    if (is_ident_start(c)) {
      const std::size_t begin = i;
      while (i < source.size() && is_ident_char(source[i])) ++i;
      const std::string_view text = source.substr(begin, i - begin);
      if (!is_valid_identifier(text)) {
        return unexpected(make_error(
            ErrorKind::Parse, span_at(begin),
            fmt::format("invalid identifier '{}': use lowercase letters, digits and '_'", text)));
      }
      push(TokenKind::Identifier, begin, i - begin);
      continue;
    }
    const std::size_t begin = i;
    auto two = [&](char next) { return i + 1 < source.size() && source[i + 1] == next; };
    switch (c) {
      case '+': push(TokenKind::Plus, begin, 1); ++i; break;
      case '-': push(TokenKind::Minus, begin, 1); ++i; break;
      case '*': push(TokenKind::Star, begin, 1); ++i; break;
      case '/': push(TokenKind::Slash, begin, 1); ++i; break;
      case '(': push(TokenKind::LParen, begin, 1); ++i; break;
      case ')': push(TokenKind::RParen, begin, 1); ++i; break;
      case ',': push(TokenKind::Comma, begin, 1); ++i; break;
      case '<':
        if (two('=')) { push(TokenKind::LessEqual, begin, 2); i += 2; }
        else { push(TokenKind::Less, begin, 1); ++i; }
        break;
      case '>':
        if (two('=')) { push(TokenKind::GreaterEqual, begin, 2); i += 2; }
        else { push(TokenKind::Greater, begin, 1); ++i; }
        break;
      case '=':
        if (two('=')) { push(TokenKind::EqualEqual, begin, 2); i += 2; }
        else { push(TokenKind::Assign, begin, 1); ++i; }
        break;
      default: {
        // Report whole UTF-8 sequences, not single bytes.
        std::size_t len = 1;
        const auto lead = static_cast<unsigned char>(c);
        if (lead >= 0xF0) len = 4;
        else if (lead >= 0xE0) len = 3;
        else if (lead >= 0xC0) len = 2;
        len = std::min(len, source.size() - begin);
        return unexpected(make_error(ErrorKind::Parse, span_at(begin),
                                     fmt::format("unexpected character '{}'", source.substr(begin, len))));
      }
    }
  }
  push(TokenKind::End, source.size(), 0);
  return tokens;
}

}  // namespace rwl::lang::detail

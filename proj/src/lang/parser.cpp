#include <cstring>
#include <unordered_set>

#include <fmt/format.h>

#include "lexer.hpp"
#include "rwl/lang/program.hpp"

namespace rwl::lang {

using detail::Token;
using detail::TokenKind;

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
  }
  return "?";
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Less: return "<";
    case CompareOp::LessEqual: return "<=";
    case CompareOp::Greater: return ">";
    case CompareOp::GreaterEqual: return ">=";
    case CompareOp::Equal: return "==";
  }
  return "?";
}

namespace {

struct FunctionInfo {
  Function fn;
  std::string_view name;
  int arity;
};

constexpr FunctionInfo kFunctions[] = {
    {Function::Abs, "abs", 1},     {Function::Min, "min", 2},   {Function::Max, "max", 2},
    {Function::Clamp, "clamp", 3}, {Function::Where, "where", 3}, {Function::Exp, "exp", 1},
    {Function::Tanh, "tanh", 1},   {Function::Sqrt, "sqrt", 1}, {Function::Sign, "sign", 1},
};

}  // namespace

std::string_view to_string(Function fn) {
  for (const auto& f : kFunctions) {
    if (f.fn == fn) return f.name;
  }
  return "?";
}

std::optional<Function> function_from_name(std::string_view name) {
  for (const auto& f : kFunctions) {
    if (f.name == name) return f.fn;
  }
  return std::nullopt;
}

int function_arity(Function fn) {
  for (const auto& f : kFunctions) {
    if (f.fn == fn) return f.arity;
  }
  return 0;
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::Arity: return "ArityError";
    case ErrorKind::Eval: return "EvalError";
  }
  return "Error";
}

bool is_valid_identifier(std::string_view name) {
  if (name.empty()) return false;
  const char first = name.front();
  if (!((first >= 'a' && first <= 'z') || first == '_')) return false;
  for (char c : name) {
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
  }
  return true;
}

Expr Expr::number(double v, SourceSpan at) {
  Expr e;
  e.kind = ExprKind::Number;
  e.value = v;
  e.span = at;
  return e;
}

Expr Expr::identifier(std::string n, SourceSpan at) {
  Expr e;
  e.kind = ExprKind::Identifier;
  e.name = std::move(n);
  e.span = at;
  return e;
}

Expr Expr::negate(Expr operand, SourceSpan at) {
  Expr e;
  e.kind = ExprKind::Negate;
  e.children.push_back(std::move(operand));
  e.span = at;
  return e;
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs, SourceSpan at) {
  Expr e;
  e.kind = ExprKind::Binary;
  e.binary_op = op;
  e.children.push_back(std::move(lhs));
  e.children.push_back(std::move(rhs));
  e.span = at;
  return e;
}

Expr Expr::compare(CompareOp op, Expr lhs, Expr rhs, SourceSpan at) {
  Expr e;
  e.kind = ExprKind::Compare;
  e.compare_op = op;
  e.children.push_back(std::move(lhs));
  e.children.push_back(std::move(rhs));
  e.span = at;
  return e;
}

Expr Expr::call(Function fn, std::vector<Expr> args, SourceSpan at) {
  Expr e;
  e.kind = ExprKind::Call;
  e.function = fn;
  e.children = std::move(args);
  e.span = at;
  return e;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  switch (a.kind) {
    case ExprKind::Number:
      if (std::memcmp(&a.value, &b.value, sizeof(double)) != 0) return false;
      break;
    case ExprKind::Identifier:
      if (a.name != b.name) return false;
      break;
    case ExprKind::Negate:
      break;
    case ExprKind::Binary:
      if (a.binary_op != b.binary_op) return false;
      break;
    case ExprKind::Compare:
      if (a.compare_op != b.compare_op) return false;
      break;
    case ExprKind::Call:
      if (a.function != b.function) return false;
      break;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!structurally_equal(a.children[i], b.children[i])) return false;
  }
  return true;
}

std::vector<std::string> RewardProgram::component_names() const {
  std::vector<std::string> out;
  out.reserve(components.size());
  for (const auto& c : components) out.push_back(c.name);
  return out;
}

bool structurally_equal(const RewardProgram& a, const RewardProgram& b) {
  if (a.components.size() != b.components.size()) return false;
  for (std::size_t i = 0; i < a.components.size(); ++i) {
    if (a.components[i].name != b.components[i].name) return false;
    if (!structurally_equal(a.components[i].body, b.components[i].body)) return false;
  }
  if (a.total.has_value() != b.total.has_value()) return false;
  return !a.total || structurally_equal(a.total->body, b.total->body);
}

namespace {

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Expected<RewardProgram, RewardLangError> parse_program(std::string_view source) {
    RewardProgram program;
    program.source = std::string(source);
    std::unordered_set<std::string> seen;

    while (true) {
      skip_newlines();
      if (peek().kind == TokenKind::End) break;

      const Token& name_tok = peek();
      if (name_tok.kind != TokenKind::Identifier) {
        return fail(name_tok.span, fmt::format("expected component name, found {}", found(name_tok)));
      }
      advance();
      const std::string name(name_tok.text);
      if (function_from_name(name)) {
        return fail(name_tok.span, fmt::format("'{}' is a reserved function name", name));
      }
      if (program.total) {
        return fail(name_tok.span, "'total' must be the last component");
      }
      if (!seen.insert(name).second) {
        return fail(name_tok.span, fmt::format("duplicate component '{}'", name));
      }
      if (peek().kind != TokenKind::Assign) {
        return fail(peek().span, fmt::format("expected '=', found {}", found(peek())));
      }
      advance();

      auto body = parse_expr();
      if (!body) return unexpected(std::move(body.error()));
      if (peek().kind != TokenKind::Newline && peek().kind != TokenKind::End) {
        return fail_trailing(peek());
      }

      Component component{name, std::move(*body), name_tok.span};
      if (name == kTotalName) {
        program.total = std::move(component);
      } else {
        program.components.push_back(std::move(component));
      }
    }

    if (program.components.empty()) {
      const SourceSpan at = program.total ? program.total->span : SourceSpan{1, 1};
      return fail(at, program.total ? "program defines no components besides 'total'"
                                    : "program defines no components");
    }
    return program;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  void advance() {
    if (tokens_[pos_].kind != TokenKind::End) ++pos_;
  }
  void skip_newlines() {
    while (peek().kind == TokenKind::Newline) advance();
  }

  static std::string found(const Token& tok) {
    switch (tok.kind) {
      case TokenKind::Number:
      case TokenKind::Identifier:
        return fmt::format("'{}'", tok.text);
      default:
        return std::string(detail::describe(tok.kind));
    }
  }

  static bool is_relop(TokenKind kind) {
    return kind == TokenKind::Less || kind == TokenKind::LessEqual || kind == TokenKind::Greater ||
           kind == TokenKind::GreaterEqual || kind == TokenKind::EqualEqual;
  }

  Unexpected<RewardLangError> fail(SourceSpan at, std::string_view what) const {
    return unexpected(detail::make_error(ErrorKind::Parse, at, what));
  }

  Unexpected<RewardLangError> fail_trailing(const Token& tok) const {
    if (is_relop(tok.kind)) {
      return fail(tok.span, fmt::format("unexpected {}: comparisons are only allowed as the first "
                                        "argument of where",
                                        detail::describe(tok.kind)));
    }
    return fail(tok.span, fmt::format("expected end of line, found {}", found(tok)));
  }

  using ExprResult = Expected<Expr, RewardLangError>;

  ExprResult parse_expr() {
    auto lhs = parse_term();
    if (!lhs) return lhs;
    Expr acc = std::move(*lhs);
    while (peek().kind == TokenKind::Plus || peek().kind == TokenKind::Minus) {
      const Token op = peek();
      advance();
      auto rhs = parse_term();
      if (!rhs) return rhs;
      acc = Expr::binary(op.kind == TokenKind::Plus ? BinaryOp::Add : BinaryOp::Sub, std::move(acc),
                         std::move(*rhs), op.span);
    }
    return acc;
  }

  ExprResult parse_term() {
    auto lhs = parse_factor();
    if (!lhs) return lhs;
    Expr acc = std::move(*lhs);
    while (peek().kind == TokenKind::Star || peek().kind == TokenKind::Slash) {
      const Token op = peek();
      advance();
      auto rhs = parse_factor();
      if (!rhs) return rhs;
      acc = Expr::binary(op.kind == TokenKind::Star ? BinaryOp::Mul : BinaryOp::Div, std::move(acc),
                         std::move(*rhs), op.span);
    }
    return acc;
  }

  ExprResult parse_factor() {
    if (peek().kind == TokenKind::Minus) {
      const SourceSpan at = peek().span;
      advance();
      auto operand = parse_atom();
      if (!operand) return operand;
      return Expr::negate(std::move(*operand), at);
    }
    return parse_atom();
  }

  ExprResult parse_atom() {
    const Token tok = peek();
    switch (tok.kind) {
      case TokenKind::Number:
        advance();
        return Expr::number(tok.number, tok.span);
      case TokenKind::Identifier:
        advance();
        if (peek().kind == TokenKind::LParen) return parse_call(tok);
        return Expr::identifier(std::string(tok.text), tok.span);
      case TokenKind::LParen: {
        advance();
        auto inner = parse_expr();
        if (!inner) return inner;
        if (peek().kind != TokenKind::RParen) {
          if (is_relop(peek().kind)) return fail_trailing(peek());
          return fail(peek().span, fmt::format("expected ')', found {}", found(peek())));
        }
        advance();
        return inner;
      }
      default:
        return fail(tok.span, "expected expression");
    }
  }

  ExprResult parse_call(const Token& name_tok) {
    const auto fn = function_from_name(name_tok.text);
    if (!fn) return fail(name_tok.span, fmt::format("unknown function '{}'", name_tok.text));
    advance();  // '('

    std::vector<Expr> args;
    if (peek().kind == TokenKind::RParen) {
      return fail(peek().span, "expected expression");
    }
    while (true) {
      ExprResult arg = (*fn == Function::Where && args.empty()) ? parse_condition() : parse_expr();
      if (!arg) return arg;
      args.push_back(std::move(*arg));
      if (peek().kind == TokenKind::Comma) {
        advance();
        continue;
      }
      if (peek().kind == TokenKind::RParen) {
        advance();
        break;
      }
      if (is_relop(peek().kind)) return fail_trailing(peek());
      return fail(peek().span, fmt::format("expected ',' or ')', found {}", found(peek())));
    }

    const int arity = function_arity(*fn);
    if (static_cast<int>(args.size()) != arity) {
      return unexpected(detail::make_error(
          ErrorKind::Arity, name_tok.span,
          fmt::format("function '{}' expects {} argument{}, got {}", name_tok.text, arity,
                      arity == 1 ? "" : "s", args.size())));
    }
    return Expr::call(*fn, std::move(args), name_tok.span);
  }

  ExprResult parse_condition() {
    auto lhs = parse_expr();
    if (!lhs) return lhs;
    const Token op = peek();
    CompareOp cmp;
    switch (op.kind) {
      case TokenKind::Less: cmp = CompareOp::Less; break;
      case TokenKind::LessEqual: cmp = CompareOp::LessEqual; break;
      case TokenKind::Greater: cmp = CompareOp::Greater; break;
      case TokenKind::GreaterEqual: cmp = CompareOp::GreaterEqual; break;
      case TokenKind::EqualEqual: cmp = CompareOp::Equal; break;
      default:
        return fail(op.span, fmt::format("expected comparison operator in first argument of where, "
                                         "found {}",
                                         found(op)));
    }
    advance();
    auto rhs = parse_expr();
    if (!rhs) return rhs;
    return Expr::compare(cmp, std::move(*lhs), std::move(*rhs), op.span);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Expected<RewardProgram, RewardLangError> parse_program(std::string_view source) {
  if (source.size() > kMaxSourceBytes) {
    return unexpected(detail::make_error(ErrorKind::Parse, SourceSpan{1, 1},
                                         fmt::format("source exceeds {} bytes", kMaxSourceBytes)));
  }
  auto tokens = detail::tokenize(source);
  if (!tokens) return unexpected(std::move(tokens.error()));
  Parser parser(std::move(*tokens));
  return parser.parse_program(source);
}

}  // namespace rwl::lang

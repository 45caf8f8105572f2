#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rwl/common/expected.hpp"
#include "rwl/common/schema.hpp"

namespace rwl::lang {

/// 1-based line and byte column into the program source.
struct SourceSpan {
  int line = 1;
  int column = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class ExprKind : std::uint8_t { Number, Identifier, Negate, Binary, Compare, Call };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div };
enum class CompareOp : std::uint8_t { Less, LessEqual, Greater, GreaterEqual, Equal };
enum class Function : std::uint8_t { Abs, Min, Max, Clamp, Where, Exp, Tanh, Sqrt, Sign };

std::string_view to_string(BinaryOp op);
std::string_view to_string(CompareOp op);
std::string_view to_string(Function fn);
std::optional<Function> function_from_name(std::string_view name);
int function_arity(Function fn);

/// Expression tree node. Which payload field is meaningful depends on
/// `kind`; children are ordered operands/arguments.
struct Expr {
  ExprKind kind = ExprKind::Number;
  double value = 0.0;  // Number; always >= 0, negation is a separate node
  std::string name;    // Identifier
  BinaryOp binary_op = BinaryOp::Add;
  CompareOp compare_op = CompareOp::Less;
  Function function = Function::Abs;
  std::vector<Expr> children;
  SourceSpan span;

  static Expr number(double v, SourceSpan at = {});
  static Expr identifier(std::string n, SourceSpan at = {});
  static Expr negate(Expr operand, SourceSpan at = {});
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, SourceSpan at = {});
  static Expr compare(CompareOp op, Expr lhs, Expr rhs, SourceSpan at = {});
  static Expr call(Function fn, std::vector<Expr> args, SourceSpan at = {});
};

/// Equality of shape and payloads, ignoring source spans. Number payloads
/// compare bit-for-bit.
bool structurally_equal(const Expr& a, const Expr& b);

struct Component {
  std::string name;
  Expr body;
  SourceSpan span;
};

/// A reward program: named components evaluated in order, plus an optional
/// explicit `total` that replaces the default left-to-right sum.
struct RewardProgram {
  std::vector<Component> components;
  std::optional<Component> total;
  std::string source;

  std::vector<std::string> component_names() const;
};

bool structurally_equal(const RewardProgram& a, const RewardProgram& b);

enum class ErrorKind : std::uint8_t { Parse, UnknownIdentifier, Arity, Eval };

std::string_view to_string(ErrorKind kind);

struct UnknownName {
  std::string name;
  SourceSpan span;
};

struct RewardLangError {
  ErrorKind kind = ErrorKind::Parse;
  /// Complete, deterministic description; forwarded verbatim in repair prompts.
  std::string message;
  SourceSpan span;
  std::string component;             // set for Eval errors
  std::vector<UnknownName> unknowns;  // set for UnknownIdentifier errors
};

inline constexpr std::size_t kMaxSourceBytes = 64 * 1024;
inline constexpr std::string_view kTotalName = "total";

Expected<RewardProgram, RewardLangError> parse_program(std::string_view source);

/// Canonical text: one component per line, single spaces around `=` and
/// binary operators, minimal parentheses. No trailing newline.
std::string print_program(const RewardProgram& program);
std::string print_expr(const Expr& expr);

/// Checks every identifier is a schema channel or an earlier component.
std::optional<RewardLangError> validate_program(const RewardProgram& program,
                                                const ObservationSchema& schema);

/// Identifier rule for component and channel names: [a-z_][a-z0-9_]*.
bool is_valid_identifier(std::string_view name);

/// Fixed description of the language handed to program writers.
const std::string& grammar_help_text();

/// Info-string of the fenced block that carries a program in model replies.
inline constexpr std::string_view kProgramFenceTag = "reward";

}  // namespace rwl::lang

#include <charconv>
#include <string>

#include "rwl/lang/program.hpp"

namespace rwl::lang {

namespace {

// Binding strength; atoms and calls bind tightest.
int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Binary:
      return (e.binary_op == BinaryOp::Add || e.binary_op == BinaryOp::Sub) ? 1 : 2;
    case ExprKind::Negate:
      return 3;
    case ExprKind::Compare:
      return 0;
    default:
      return 4;
  }
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string_view text(buf, static_cast<std::size_t>(res.ptr - buf));
  out += text;
  if (text.find_first_of(".e") == std::string_view::npos) out += ".0";
}

void append_expr(std::string& out, const Expr& e);

void append_wrapped(std::string& out, const Expr& e, bool parens) {
  if (parens) out += '(';
  append_expr(out, e);
  if (parens) out += ')';
}

void append_expr(std::string& out, const Expr& e) {
  switch (e.kind) {
    case ExprKind::Number:
      append_number(out, e.value);
      return;
    case ExprKind::Identifier:
      out += e.name;
      return;
    case ExprKind::Negate:
      out += '-';
      // The grammar only allows an atom after unary minus.
      append_wrapped(out, e.children[0], precedence(e.children[0]) < 4);
      return;
    case ExprKind::Binary: {
      const int p = precedence(e);
      append_wrapped(out, e.children[0], precedence(e.children[0]) < p);
      out += ' ';
      out += to_string(e.binary_op);
      out += ' ';
      append_wrapped(out, e.children[1], precedence(e.children[1]) <= p);
      return;
    }
    case ExprKind::Compare:
      append_expr(out, e.children[0]);
      out += ' ';
      out += to_string(e.compare_op);
      out += ' ';
      append_expr(out, e.children[1]);
      return;
    case ExprKind::Call:
      out += to_string(e.function);
      out += '(';
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i > 0) out += ", ";
        append_expr(out, e.children[i]);
      }
      out += ')';
      return;
  }
}

}  // namespace

std::string print_expr(const Expr& expr) {
  std::string out;
  append_expr(out, expr);
  return out;
}

std::string print_program(const RewardProgram& program) {
  std::string out;
  auto line = [&](const Component& c) {
    if (!out.empty()) out += '\n';
    out += c.name;
    out += " = ";
    append_expr(out, c.body);
  };
  for (const auto& c : program.components) line(c);
  if (program.total) line(*program.total);
  return out;
}

}  // namespace rwl::lang

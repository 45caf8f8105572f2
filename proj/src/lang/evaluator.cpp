#include "rwl/lang/evaluator.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>

namespace rwl::lang {

namespace {

constexpr std::size_t kInlineStack = 64;

RewardLangError eval_error(std::string_view component, std::string_view what) {
  RewardLangError err;
  err.kind = ErrorKind::Eval;
  err.component = std::string(component);
  err.message = fmt::format("evaluation error in component '{}': {}", component, what);
  return err;
}

std::size_t stack_depth(const Expr& e) {
  // Children are pushed left to right; child i sits on i earlier results.
  std::size_t depth = 1;
  for (std::size_t i = 0; i < e.children.size(); ++i) {
    depth = std::max(depth, i + stack_depth(e.children[i]));
  }
  return depth;
}

}  // namespace

void CompiledProgram::emit(const Expr& e, const std::vector<std::uint32_t>& scope_slots,
                           const std::vector<std::string>& scope_names) {
  for (const auto& child : e.children) emit(child, scope_slots, scope_names);
  switch (e.kind) {
    case ExprKind::Number:
      code_.push_back({Op::Const, static_cast<std::uint32_t>(constants_.size())});
      constants_.push_back(e.value);
      return;
    case ExprKind::Identifier:
      // Latest binding wins, so components shadow channels of the same name.
      for (std::size_t i = scope_names.size(); i-- > 0;) {
        if (scope_names[i] == e.name) {
          code_.push_back({Op::Load, scope_slots[i]});
          return;
        }
      }
      return;  // unreachable after the unknown-identifier check in compile()
    case ExprKind::Negate:
      code_.push_back({Op::Neg, 0});
      return;
    case ExprKind::Binary: {
      static constexpr Op ops[] = {Op::Add, Op::Sub, Op::Mul, Op::Div};
      code_.push_back({ops[static_cast<int>(e.binary_op)], 0});
      return;
    }
    case ExprKind::Compare: {
      static constexpr Op ops[] = {Op::Less, Op::LessEqual, Op::Greater, Op::GreaterEqual, Op::Equal};
      code_.push_back({ops[static_cast<int>(e.compare_op)], 0});
      return;
    }
    case ExprKind::Call: {
      static constexpr Op ops[] = {Op::Abs, Op::Min, Op::Max, Op::Clamp, Op::Where,
                                   Op::Exp, Op::Tanh, Op::Sqrt, Op::Sign};
      code_.push_back({ops[static_cast<int>(e.function)], 0});
      return;
    }
  }
}

Expected<CompiledProgram, RewardLangError> CompiledProgram::compile(
    const RewardProgram& program, std::span<const std::string> channels) {
  ObservationSchema schema;
  for (const auto& name : channels) schema.channels.push_back(Channel{name, "", ""});
  if (auto err = validate_program(program, schema)) return unexpected(std::move(*err));

  CompiledProgram out;
  out.channel_count_ = channels.size();
  out.channel_names_.assign(channels.begin(), channels.end());
  out.component_names_ = program.component_names();
  out.explicit_total_ = program.total.has_value();

  std::vector<std::string> scope_names(channels.begin(), channels.end());
  std::vector<std::uint32_t> scope_slots;
  for (std::size_t i = 0; i < channels.size(); ++i) scope_slots.push_back(static_cast<std::uint32_t>(i));

  auto add_segment = [&](const Expr& body) {
    const auto begin = static_cast<std::uint32_t>(out.code_.size());
    out.emit(body, scope_slots, scope_names);
    out.segments_.push_back({begin, static_cast<std::uint32_t>(out.code_.size())});
    out.max_stack_ = std::max(out.max_stack_, stack_depth(body));
  };
  for (std::size_t j = 0; j < program.components.size(); ++j) {
    add_segment(program.components[j].body);
    scope_names.push_back(program.components[j].name);
    scope_slots.push_back(static_cast<std::uint32_t>(channels.size() + j));
  }
  if (program.total) add_segment(program.total->body);
  return out;
}

Expected<double, RewardLangError> CompiledProgram::evaluate(std::span<const double> channels,
                                                            std::span<double> components_out) const {
  std::array<double, kInlineStack> inline_stack;
  std::vector<double> heap_stack;
  double* stack = inline_stack.data();
  if (max_stack_ > kInlineStack) {
    heap_stack.resize(max_stack_);
    stack = heap_stack.data();
  }
  auto slot = [&](std::uint32_t s) {
    return s < channel_count_ ? channels[s] : components_out[s - channel_count_];
  };

  double total = 0.0;
  for (std::size_t seg = 0; seg < segments_.size(); ++seg) {
    const bool is_total = seg == component_names_.size();
    const std::string_view owner = is_total ? kTotalName : std::string_view(component_names_[seg]);
    std::size_t sp = 0;
    for (std::uint32_t pc = segments_[seg].begin; pc < segments_[seg].end; ++pc) {
      const Instr in = code_[pc];
      double r = 0.0;
      const char* op_name = nullptr;
      switch (in.op) {
        case Op::Const: stack[sp++] = constants_[in.arg]; continue;
        case Op::Load:
          if (in.arg < channel_count_ && !std::isfinite(channels[in.arg])) {
            return unexpected(eval_error(
                owner, fmt::format("channel '{}' is not finite", channel_names_[in.arg])));
          }
          stack[sp++] = slot(in.arg);
          continue;
        case Op::Neg: stack[sp - 1] = -stack[sp - 1]; continue;
        case Op::Add: r = stack[sp - 2] + stack[sp - 1]; op_name = "+"; --sp; break;
        case Op::Sub: r = stack[sp - 2] - stack[sp - 1]; op_name = "-"; --sp; break;
        case Op::Mul: r = stack[sp - 2] * stack[sp - 1]; op_name = "*"; --sp; break;
        case Op::Div:
          if (stack[sp - 1] == 0.0) return unexpected(eval_error(owner, "division by zero"));
          r = stack[sp - 2] / stack[sp - 1];
          op_name = "/";
          --sp;
          break;
        case Op::Less: r = stack[sp - 2] < stack[sp - 1] ? 1.0 : 0.0; --sp; break;
        case Op::LessEqual: r = stack[sp - 2] <= stack[sp - 1] ? 1.0 : 0.0; --sp; break;
        case Op::Greater: r = stack[sp - 2] > stack[sp - 1] ? 1.0 : 0.0; --sp; break;
        case Op::GreaterEqual: r = stack[sp - 2] >= stack[sp - 1] ? 1.0 : 0.0; --sp; break;
        case Op::Equal: r = stack[sp - 2] == stack[sp - 1] ? 1.0 : 0.0; --sp; break;
        case Op::Abs: r = std::fabs(stack[sp - 1]); break;
        case Op::Min: {
          const double a = stack[sp - 2], b = stack[sp - 1];
          r = (b < a) ? b : a;
          --sp;
          break;
        }
        case Op::Max: {
          const double a = stack[sp - 2], b = stack[sp - 1];
          r = (a < b) ? b : a;
          --sp;
          break;
        }
        case Op::Clamp: {
          const double x = stack[sp - 3], lo = stack[sp - 2], hi = stack[sp - 1];
          const double m = (x < lo) ? lo : x;
          r = (hi < m) ? hi : m;
          sp -= 2;
          break;
        }
        case Op::Where:
          r = stack[sp - 3] != 0.0 ? stack[sp - 2] : stack[sp - 1];
          sp -= 2;
          break;
        case Op::Exp: r = std::exp(stack[sp - 1]); op_name = "exp"; break;
        case Op::Tanh: r = std::tanh(stack[sp - 1]); break;
        case Op::Sqrt:
          if (stack[sp - 1] < 0.0) return unexpected(eval_error(owner, "square root of negative value"));
          r = std::sqrt(stack[sp - 1]);
          break;
        case Op::Sign: {
          const double x = stack[sp - 1];
          r = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
          break;
        }
      }
      if (op_name != nullptr && !std::isfinite(r)) {
        return unexpected(eval_error(owner, fmt::format("non-finite result in '{}'", op_name)));
      }
      stack[sp - 1] = r;
    }
    const double value = stack[0];
    if (is_total) {
      total = value;
    } else {
      components_out[seg] = value;
    }
  }

  if (!explicit_total_) {
    total = components_out[0];
    for (std::size_t j = 1; j < component_names_.size(); ++j) total += components_out[j];
    if (!std::isfinite(total)) {
      return unexpected(eval_error(kTotalName, "non-finite result in '+'"));
    }
  }
  return total;
}

Expected<ComponentValues, RewardLangError> evaluate_program(const RewardProgram& program,
                                                            const EvalContext& ctx) {
  std::vector<std::string> names;
  std::vector<double> values;
  names.reserve(ctx.size());
  values.reserve(ctx.size());
  for (const auto& [name, value] : ctx) {
    names.push_back(name);
    values.push_back(value);
  }
  auto compiled = CompiledProgram::compile(program, names);
  if (!compiled) return unexpected(std::move(compiled.error()));

  std::vector<double> components(compiled->component_count());
  auto total = compiled->evaluate(values, components);
  if (!total) return unexpected(std::move(total.error()));

  ComponentValues out;
  out.total = *total;
  for (std::size_t j = 0; j < components.size(); ++j) {
    out.components[compiled->component_names()[j]] = components[j];
  }
  return out;
}

}  // namespace rwl::lang

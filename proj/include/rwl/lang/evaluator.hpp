#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rwl/common/expected.hpp"
#include "rwl/lang/program.hpp"

namespace rwl::lang {

/// Name -> value bindings for channels (and, during evaluation, components).
using EvalContext = std::map<std::string, double, std::less<>>;

struct ComponentValues {
  double total = 0.0;
  std::map<std::string, double> components;
};

/// A program lowered to postfix code with identifiers resolved to slots.
/// Slots [0, channel_count) hold channel values; component results follow.
/// Instances are immutable and safe to share across threads.
class CompiledProgram {
 public:
  /// Fails with UnknownIdentifier when a name is neither a channel nor an
  /// earlier component.
  static Expected<CompiledProgram, RewardLangError> compile(const RewardProgram& program,
                                                           std::span<const std::string> channels);

  std::size_t channel_count() const { return channel_count_; }
  std::size_t component_count() const { return component_names_.size(); }
  const std::vector<std::string>& component_names() const { return component_names_; }

  /// Evaluates every component in declaration order, writing component
  /// values to `components_out` (size component_count()) and returning the
  /// total. `channels` must be in the order given to compile().
  Expected<double, RewardLangError> evaluate(std::span<const double> channels,
                                             std::span<double> components_out) const;

 private:
  enum class Op : std::uint8_t {
    Const, Load, Neg, Add, Sub, Mul, Div,
    Less, LessEqual, Greater, GreaterEqual, Equal,
    Abs, Min, Max, Clamp, Where, Exp, Tanh, Sqrt, Sign
  };
  struct Instr {
    Op op;
    std::uint32_t arg;
  };
  struct Segment {
    std::uint32_t begin;
    std::uint32_t end;
  };

  void emit(const Expr& expr, const std::vector<std::uint32_t>& scope_slots,
            const std::vector<std::string>& scope_names);

  std::size_t channel_count_ = 0;
  std::vector<std::string> channel_names_;
  std::vector<std::string> component_names_;
  std::vector<Instr> code_;
  std::vector<double> constants_;
  std::vector<Segment> segments_;  // one per component, then total if explicit
  bool explicit_total_ = false;
  std::size_t max_stack_ = 0;
};

/// Evaluates `program` against `ctx`. Every component is bound into the
/// context before the next evaluates; any non-finite intermediate aborts
/// with an Eval error naming the component.
Expected<ComponentValues, RewardLangError> evaluate_program(const RewardProgram& program,
                                                            const EvalContext& ctx);

}  // namespace rwl::lang

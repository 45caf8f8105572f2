#include "naive_eval.hpp"

#include <cmath>
#include <stdexcept>

namespace rwl::testing {

namespace {

using lang::BinaryOp;
using lang::CompareOp;
using lang::Expr;
using lang::ExprKind;
using lang::Function;

struct Failure {
  std::string what;
};

class Walker {
 public:
  explicit Walker(std::map<std::string, double> env, const std::map<std::string, double>& channels)
      : env_(std::move(env)), channels_(channels) {}

  void bind(const std::string& name, double v) { env_[name] = v; }

  double eval(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Number:
        return e.value;
      case ExprKind::Identifier: {
        const double v = env_.at(e.name);
        if (!std::isfinite(v) && channels_.count(e.name) && !bound_component(e.name)) {
          throw Failure{"channel '" + e.name + "' is not finite"};
        }
        return v;
      }
      case ExprKind::Negate:
        return -eval(e.children[0]);
      case ExprKind::Binary: {
        const double a = eval(e.children[0]);
        const double b = eval(e.children[1]);
        double r = 0.0;
        std::string op;
        switch (e.binary_op) {
          case BinaryOp::Add: r = a + b; op = "+"; break;
          case BinaryOp::Sub: r = a - b; op = "-"; break;
          case BinaryOp::Mul: r = a * b; op = "*"; break;
          case BinaryOp::Div:
            if (b == 0.0) throw Failure{"division by zero"};
            r = a / b;
            op = "/";
            break;
        }
        return check(r, op);
      }
      case ExprKind::Compare: {
        const double a = eval(e.children[0]);
        const double b = eval(e.children[1]);
        bool r = false;
        switch (e.compare_op) {
          case CompareOp::Less: r = a < b; break;
          case CompareOp::LessEqual: r = a <= b; break;
          case CompareOp::Greater: r = a > b; break;
          case CompareOp::GreaterEqual: r = a >= b; break;
          case CompareOp::Equal: r = a == b; break;
        }
        return r ? 1.0 : 0.0;
      }
      case ExprKind::Call: {
        std::vector<double> args;
        for (const auto& c : e.children) args.push_back(eval(c));
        switch (e.function) {
          case Function::Abs: return std::fabs(args[0]);
          case Function::Min: return args[1] < args[0] ? args[1] : args[0];
          case Function::Max: return args[0] < args[1] ? args[1] : args[0];
          case Function::Clamp: {
            const double lo_applied = args[0] < args[1] ? args[1] : args[0];
            return args[2] < lo_applied ? args[2] : lo_applied;
          }
          case Function::Where: return args[0] != 0.0 ? args[1] : args[2];
          case Function::Exp: return check(std::exp(args[0]), "exp");
          case Function::Tanh: return std::tanh(args[0]);
          case Function::Sqrt:
            if (args[0] < 0.0) throw Failure{"square root of negative value"};
            return std::sqrt(args[0]);
          case Function::Sign: return args[0] > 0.0 ? 1.0 : (args[0] < 0.0 ? -1.0 : 0.0);
        }
      }
    }
    throw std::logic_error("unhandled node");
  }

  std::vector<std::string> components;

 private:
  static double check(double r, const std::string& op) {
    if (!std::isfinite(r)) throw Failure{"non-finite result in '" + op + "'"};
    return r;
  }
  bool bound_component(const std::string& name) const {
    for (const auto& c : components) {
      if (c == name) return true;
    }
    return false;
  }

  std::map<std::string, double> env_;
  const std::map<std::string, double>& channels_;
};

}  // namespace

NaiveResult naive_evaluate(const lang::RewardProgram& program, const std::map<std::string, double>& channels) {
  NaiveResult out;
  Walker w(channels, channels);
  std::string current;
  try {
    for (const auto& c : program.components) {
      current = c.name;
      const double v = w.eval(c.body);
      out.components.push_back(v);
      w.bind(c.name, v);
      w.components.push_back(c.name);
    }
    if (program.total) {
      current = "total";
      out.total = w.eval(program.total->body);
    } else {
      current = "total";
      double sum = 0.0;
      for (std::size_t i = 0; i < out.components.size(); ++i) sum = (i == 0) ? out.components[0] : sum + out.components[i];
      if (!std::isfinite(sum)) throw Failure{"non-finite result in '+'"};
      out.total = sum;
    }
    out.ok = true;
  } catch (const Failure& f) {
    out.error = "evaluation error in component '" + current + "': " + f.what;
  }
  return out;
}

std::vector<std::string> default_test_channels() {
  return {"torso_z", "vel_x", "vel_z", "pitch", "ang_vel", "up_proj", "contact", "action_prev_0"};
}

ProgramGenerator::ProgramGenerator(std::uint64_t seed, std::vector<std::string> channels, int max_depth)
    : rng_(seed), channels_(std::move(channels)), max_depth_(max_depth) {}

double ProgramGenerator::number() {
  std::uniform_int_distribution<int> pick(0, 3);
  switch (pick(rng_)) {
    case 0: return static_cast<double>(std::uniform_int_distribution<int>(0, 10)(rng_));
    case 1: return std::uniform_int_distribution<int>(0, 40)(rng_) / 8.0;
    case 2: return std::uniform_real_distribution<double>(0.0, 5.0)(rng_);
    default: return std::pow(10.0, std::uniform_int_distribution<int>(-6, 6)(rng_));
  }
}

lang::Expr ProgramGenerator::expr(int depth, const std::vector<std::string>& scope) {
  std::uniform_int_distribution<int> kind(0, depth >= max_depth_ ? 1 : 5);
  switch (kind(rng_)) {
    case 0:
      return Expr::number(number());
    case 1:
      return Expr::identifier(scope[std::uniform_int_distribution<std::size_t>(0, scope.size() - 1)(rng_)]);
    case 2:
      return Expr::negate(expr(depth + 1, scope));
    case 3:
    case 4: {
      const auto op = static_cast<BinaryOp>(std::uniform_int_distribution<int>(0, 3)(rng_));
      return Expr::binary(op, expr(depth + 1, scope), expr(depth + 1, scope));
    }
    default: {
      const auto fn = static_cast<Function>(std::uniform_int_distribution<int>(0, 8)(rng_));
      std::vector<Expr> args;
      if (fn == Function::Where) {
        const auto cmp = static_cast<CompareOp>(std::uniform_int_distribution<int>(0, 4)(rng_));
        args.push_back(Expr::compare(cmp, expr(depth + 1, scope), expr(depth + 1, scope)));
        args.push_back(expr(depth + 1, scope));
        args.push_back(expr(depth + 1, scope));
      } else {
        for (int i = 0; i < lang::function_arity(fn); ++i) args.push_back(expr(depth + 1, scope));
      }
      return Expr::call(fn, std::move(args));
    }
  }
}

lang::RewardProgram ProgramGenerator::next() {
  lang::RewardProgram p;
  std::vector<std::string> scope = channels_;
  const int n = std::uniform_int_distribution<int>(1, 4)(rng_);
  for (int i = 0; i < n; ++i) {
    lang::Component c;
    c.name = "c" + std::to_string(i);
    c.body = expr(1, scope);
    p.components.push_back(std::move(c));
    scope.push_back("c" + std::to_string(i));
  }
  if (std::bernoulli_distribution(0.3)(rng_)) {
    lang::Component t;
    t.name = std::string(lang::kTotalName);
    t.body = expr(1, scope);
    p.total = std::move(t);
  }
  return p;
}

std::map<std::string, double> ProgramGenerator::random_context() {
  std::map<std::string, double> ctx;
  for (const auto& c : channels_) {
    const int r = std::uniform_int_distribution<int>(0, 9)(rng_);
    ctx[c] = (r == 0) ? 0.0 : std::uniform_real_distribution<double>(-3.0, 3.0)(rng_);
  }
  return ctx;
}

}  // namespace rwl::testing

#include "rwl/lang/program.hpp"

namespace rwl::lang {

const std::string& grammar_help_text() {
  static const std::string text = R"(Reward program format (reward-lang v1):

Write the reward as a small program of named components, one per line:

    name = expression

- Names use lowercase letters, digits and '_' and start with a letter or '_'.
- An expression may use the observation channels listed in the environment
  description, numbers (e.g. 2, 0.5, 1e-3), earlier component names,
  + - * / with the usual precedence, unary minus, and parentheses.
- Functions: abs(x), min(a, b), max(a, b), clamp(x, lo, hi), exp(x),
  tanh(x), sqrt(x), sign(x), and where(cond, a, b).
- where(cond, a, b) returns a when cond holds and b otherwise; cond is a
  single comparison using <, <=, >, >= or ==. Comparisons are allowed only
  there. Both a and b are always evaluated, so guard denominators
  (e.g. x / max(abs(y), 0.01)) instead of relying on where.
- clamp(x, lo, hi) limits x to the interval [lo, hi].
- The total reward is the sum of all components. To weight or combine
  them differently, add a final line `total = expression`; it must be the
  last line and may use every component.
- Lines starting with # are comments. Division by zero, square roots of
  negative numbers and overflow are errors.

Return the program in a fenced block tagged reward:

```reward
forward_reward = vel_x
upright_reward = 0.5 * up_proj
spin_penalty = -0.1 * abs(ang_vel)
```
)";
  return text;
}

}  // namespace rwl::lang

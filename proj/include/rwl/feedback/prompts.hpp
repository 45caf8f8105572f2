#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rwl::feedback {

enum class PromptKind {
  VlmSystem,
  VlmInitial,
  VlmReview,
  LlmSystem,
  LlmInitial,
  LlmReview,
  LlmError,
  SingleLevelDirect,
};

inline constexpr PromptKind kAllPromptKinds[] = {
    PromptKind::VlmSystem, PromptKind::VlmInitial, PromptKind::VlmReview, PromptKind::LlmSystem,
    PromptKind::LlmInitial, PromptKind::LlmReview, PromptKind::LlmError, PromptKind::SingleLevelDirect,
};

std::string_view to_string(PromptKind kind);

/// Bumped whenever any template text changes.
inline constexpr int kTemplateVersion = 1;

/// Example shown to the reward writer as the expected program shape.
inline constexpr std::string_view kRewardSignatureExample = "forward_reward = vel_x";

struct PromptContext {
  std::string creature_name;
  std::string task_description;
  std::string env_context;
  std::string reward_program;
  std::optional<int> epochfreq;
  std::string stats_summary;
  std::string feedback;
  std::string error_message;
  std::string grammar_help;
  std::string reward_signature{kRewardSignatureExample};
};

class PromptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::string& prompt_template(PromptKind kind);

/// Placeholder names the template for `kind` uses, in first-use order.
std::vector<std::string> required_placeholders(PromptKind kind);

/// Substitutes every {placeholder}. Substituted text is not rescanned.
/// Throws PromptError naming the first missing or empty placeholder.
std::string render_prompt(PromptKind kind, const PromptContext& ctx);

}  // namespace rwl::feedback

#include "rwl/feedback/prompts.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace rwl::feedback {

namespace {

const std::string kVlmSystem =
    R"(This shows observation with all available variables and information about the environment that LLM has. At any cost,limit the suggestion to what can be implemented from this data:

{env_context}
)";

const std::string kVlmInitial =
    R"(You are an expert in reinforcement learning and robotics. A Large Language Model (LLM) is tasked with writing a reward function to train a reinforcement learning agent to imitate the motion demonstrated by a {creature_name} in the video.

The task is {task_description}. Since the LLM does not have access to the video, your task is to analyze the video and provide a detailed description of the {creature_name}'s motion to assist the LLM in writing the reward function. The description should contain the goal of the task along with necessary reward function considerations to help in its development. Do not include anything else.

The format of your response must be:

1. Task: A short description of the task.

2. Possible Reward Function Considerations (bullet points): List the three most important components needed to make the task possible. Important: The components should be easy to implement as the LLM writing reward has limited access to information about the environment.
)";

const std::string kVlmReview =
    R"(I trained an agent and got the following results. Provide the major problems, along with possible improvements in motion. The format of response should be :
1. Problems: Describe the motion and problems with by carefully studying the video.
2. Rewrite Component: If some component seems to be wrongly implemented, suggest rewriting it.
3. Remove Component: If some component is not needed or is doing harm, then it is good to remove it.
4. New Component: Only if required, suggest new components needed; otherwise, there are none.

Tips for response:
1. Study the videos, reward function, reward component values and prior performances to provide feedback.
2. Do not suggest complicated reward components which are hard to implement.
3. Keep the suggestion limited to what can be changed using the reward function.
4. The output should be only the 4 points mentioned above. Don't include anything else.
5. The Low-Level LLM writing reward function doesn't have access to video, so it cannot see or analyse motion in the video; instead, you should analyse it and provide specific suggestions regarding the motion.

This was the reward function:
{reward_program}

You can also use the values I tracked for the individual components in the reward function every {epochfreq} epoch and the maximum, mean, and minimum values encountered:

{stats_summary}
)";

const std::string kLlmSystem =
    R"(You are a reward engineer trying to write reward functions to solve reinforcement learning tasks as effectively as possible. Your goal is to write a reward function for the environment that will help the agent learn the task described in the text. Your reward function should use useful variables from the environment as inputs. As an example, the reward function signature can be: {reward_signature}

{grammar_help})";

const std::string kLlmInitial =
    R"(The environment is described below:

{env_context}
Write a reward function for the following task: {task_description}.
The output of the reward function should consist of two items:
    (1) the total reward,
    (2) each individual reward component as its own named line.

The program should be formatted as a fenced block: "```reward ... ```".

Some helpful tips for writing the reward function code:
    (1) Make sure every name you use is either an observation channel or a component defined on an earlier line.
    (2) Try to keep the code and avoid writing overly complicated reward components.
    (3) Most importantly, the reward program's inputs must contain only the observation channels of the provided environment description.
    (4) Under no circumstance can you introduce new input variables.
)";

const std::string kLlmReview =
    R"(I trained an agent based on the reward function you provided and have the following suggestions -

{feedback}

For adjusting the weights you can use the values I tracked for the individual components in the reward function every {epochfreq} epoch and the maximum, mean, and minimum values encountered:

{stats_summary}


Please prioritise addressing these problems and provide a new, improved reward function that can better solve the task
)";

const std::string kLlmError =
    R"(Executing the reward function code above has the following error:
{error_message}. Please fix the bug and provide a new, improved reward function!)";

const std::string kSingleLevelDirect =
    R"(You are an expert in reinforcement learning and robotics. You are shown frames from a video of a {creature_name} (the expert) followed by frames of an agent trained with the current reward function (the learner). Your task is to write a reward function that trains a reinforcement learning agent to imitate the motion demonstrated by the {creature_name}.

The task is {task_description}.

The environment is described below:

{env_context}
This was the reward function:
{reward_program}

You can also use the values I tracked for the individual components in the reward function every {epochfreq} epoch and the maximum, mean, and minimum values encountered:

{stats_summary}

Compare the learner's motion with the expert's motion and provide a new, improved reward function that can better solve the task.
)";

std::string value_of(std::string_view name, const PromptContext& ctx) {
  if (name == "creature_name") return ctx.creature_name;
  if (name == "task_description") return ctx.task_description;
  if (name == "env_context") return ctx.env_context;
  if (name == "reward_program") return ctx.reward_program;
  if (name == "epochfreq") return ctx.epochfreq ? fmt::format("{}", *ctx.epochfreq) : std::string();
  if (name == "stats_summary") return ctx.stats_summary;
  if (name == "feedback") return ctx.feedback;
  if (name == "error_message") return ctx.error_message;
  if (name == "grammar_help") return ctx.grammar_help;
  if (name == "reward_signature") return ctx.reward_signature;
  throw PromptError(fmt::format("unknown placeholder '{}'", name));
}

struct Piece {
  bool placeholder;
  std::string_view text;
};

std::vector<Piece> split_template(std::string_view t) {
  std::vector<Piece> out;
  std::size_t pos = 0;
  while (pos < t.size()) {
    const std::size_t open = t.find('{', pos);
    if (open == std::string_view::npos) break;
    const std::size_t close = t.find('}', open);
    if (close == std::string_view::npos) break;
    if (open > pos) out.push_back({false, t.substr(pos, open - pos)});
    out.push_back({true, t.substr(open + 1, close - open - 1)});
    pos = close + 1;
  }
  if (pos < t.size()) out.push_back({false, t.substr(pos)});
  return out;
}

}  // namespace

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::VlmSystem: return "VlmSystem";
    case PromptKind::VlmInitial: return "VlmInitial";
    case PromptKind::VlmReview: return "VlmReview";
    case PromptKind::LlmSystem: return "LlmSystem";
    case PromptKind::LlmInitial: return "LlmInitial";
    case PromptKind::LlmReview: return "LlmReview";
    case PromptKind::LlmError: return "LlmError";
    case PromptKind::SingleLevelDirect: return "SingleLevelDirect";
  }
  return "?";
}

const std::string& prompt_template(PromptKind kind) {
  switch (kind) {
    case PromptKind::VlmSystem: return kVlmSystem;
    case PromptKind::VlmInitial: return kVlmInitial;
    case PromptKind::VlmReview: return kVlmReview;
    case PromptKind::LlmSystem: return kLlmSystem;
    case PromptKind::LlmInitial: return kLlmInitial;
    case PromptKind::LlmReview: return kLlmReview;
    case PromptKind::LlmError: return kLlmError;
    case PromptKind::SingleLevelDirect: return kSingleLevelDirect;
  }
  throw PromptError("unknown prompt kind");
}

std::vector<std::string> required_placeholders(PromptKind kind) {
  std::vector<std::string> out;
  for (const Piece& p : split_template(prompt_template(kind))) {
    if (!p.placeholder) continue;
    if (std::find(out.begin(), out.end(), p.text) == out.end()) out.emplace_back(p.text);
  }
  return out;
}

std::string render_prompt(PromptKind kind, const PromptContext& ctx) {
  std::string out;
  for (const Piece& p : split_template(prompt_template(kind))) {
    if (!p.placeholder) {
      out += p.text;
      continue;
    }
    const std::string v = value_of(p.text, ctx);
    if (v.empty()) {
      throw PromptError(fmt::format("{} prompt: missing placeholder '{}'", to_string(kind), p.text));
    }
    out += v;
  }
  return out;
}

}  // namespace rwl::feedback

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rwl/common/expected.hpp"
#include "rwl/common/schema.hpp"
#include "rwl/env/render.hpp"
#include "rwl/feedback/backend.hpp"
#include "rwl/feedback/prompts.hpp"
#include "rwl/feedback/reply.hpp"
#include "rwl/lang/program.hpp"

namespace rwl::feedback {

/// One backend call as recorded in a run transcript.
struct Exchange {
  std::string backend;  // "upper" or "lower"
  std::string purpose;
  int iteration = 0;
  std::vector<ChatTurn> messages;
  std::string reply;
};

struct Transcript {
  std::vector<Exchange> exchanges;

  /// Media are recorded by label and media type only.
  std::string to_json() const;
};

/// A backend bound to a transcript under a fixed name.
class Session {
 public:
  Session(Backend& backend, std::string name, Transcript& transcript)
      : backend_(backend), name_(std::move(name)), transcript_(transcript) {}

  std::string call(std::vector<ChatTurn> messages, const CallOptions& options);
  const std::string& name() const { return name_; }

 private:
  Backend& backend_;
  std::string name_;
  Transcript& transcript_;
};

/// Sampled frames (see sample_frame_indices) converted to PNG and labelled
/// "<label> frame <source index>".
std::vector<Media> frames_to_media(const std::vector<env::Frame>& frames, std::string_view label,
                                   std::size_t cap = kDefaultFrameCap);

/// Upper level: initial description of the expert demonstration.
std::string vlm_describe(Session& upper, const std::vector<Media>& expert, const PromptContext& ctx,
                         const CallOptions& options);

/// Upper level: compare expert and learner frames for the current reward.
FeedbackRecord vlm_review(Session& upper, const std::vector<Media>& expert, const std::vector<Media>& learner,
                          const PromptContext& ctx, const CallOptions& options);

struct GenerationError {
  enum class Kind { Extraction, Lang } kind = Kind::Extraction;
  std::string message;  // forwarded verbatim as the repair prompt's error
  std::optional<lang::RewardLangError> lang_error;
};

struct Generation {
  std::vector<ChatTurn> conversation;  // messages sent
  std::string reply;
  std::optional<lang::RewardProgram> program;
  std::optional<GenerationError> error;
};

/// Sends `conversation`, then extracts, parses and validates the program.
/// Parse and validation failures are returned in Generation::error.
Generation generate_program(Session& session, std::vector<ChatTurn> conversation, const ObservationSchema& schema,
                            const CallOptions& options);

/// [system LlmSystem, user LlmInitial].
std::vector<ChatTurn> initial_conversation(const PromptContext& ctx);

/// [system, user LlmInitial, assistant current program, user LlmReview].
std::vector<ChatTurn> review_conversation(const PromptContext& ctx, const std::string& current_program);

/// [system LlmSystem, user SingleLevelDirect with expert then learner media].
std::vector<ChatTurn> single_level_conversation(const PromptContext& ctx, const std::vector<Media>& expert,
                                                const std::vector<Media>& learner);

/// The failed exchange's system turn and last user turn, the failing reply
/// as the assistant turn, then LlmError with `ctx.error_message`.
std::vector<ChatTurn> error_conversation(const std::vector<ChatTurn>& failed_conversation,
                                         const std::string& failed_reply, const PromptContext& ctx);

/// Text wrapped in a fenced block tagged for programs.
std::string fence_program(std::string_view program_text);

}  // namespace rwl::feedback

#include "rwl/feedback/generate.hpp"

#include <fmt/format.h>
#include <json.hpp>

namespace rwl::feedback {

std::string Transcript::to_json() const {
  nlohmann::json ex = nlohmann::json::array();
  for (const auto& e : exchanges) {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& turn : e.messages) {
      nlohmann::json media = nlohmann::json::array();
      for (const auto& m : turn.media) media.push_back({{"label", m.label}, {"media_type", m.media_type}});
      msgs.push_back({{"role", to_string(turn.role)}, {"text", turn.text}, {"media", media}});
    }
    ex.push_back({{"backend", e.backend},
                  {"purpose", e.purpose},
                  {"iteration", e.iteration},
                  {"messages", msgs},
                  {"reply", e.reply}});
  }
  nlohmann::json j = {{"template_version", kTemplateVersion}, {"exchanges", ex}};
  return j.dump(2) + "\n";
}

std::string Session::call(std::vector<ChatTurn> messages, const CallOptions& options) {
  std::string reply = backend_.complete(messages, options);
  transcript_.exchanges.push_back({name_, options.purpose, options.iteration, std::move(messages), reply});
  return reply;
}

std::vector<Media> frames_to_media(const std::vector<env::Frame>& frames, std::string_view label,
                                   std::size_t cap) {
  std::vector<Media> out;
  for (std::size_t i : sample_frame_indices(frames.size(), cap)) {
    out.push_back({"image/png", fmt::format("{} frame {}", label, i), env::encode_png(frames[i])});
  }
  return out;
}

std::string vlm_describe(Session& upper, const std::vector<Media>& expert, const PromptContext& ctx,
                         const CallOptions& options) {
  std::vector<ChatTurn> msgs = {
      {Role::System, render_prompt(PromptKind::VlmSystem, ctx), {}},
      {Role::User, render_prompt(PromptKind::VlmInitial, ctx), expert},
  };
  return upper.call(std::move(msgs), options);
}

FeedbackRecord vlm_review(Session& upper, const std::vector<Media>& expert, const std::vector<Media>& learner,
                          const PromptContext& ctx, const CallOptions& options) {
  std::vector<Media> media = expert;
  media.insert(media.end(), learner.begin(), learner.end());
  std::vector<ChatTurn> msgs = {
      {Role::System, render_prompt(PromptKind::VlmSystem, ctx), {}},
      {Role::User, render_prompt(PromptKind::VlmReview, ctx), std::move(media)},
  };
  return parse_vlm_feedback(upper.call(std::move(msgs), options));
}

std::string fence_program(std::string_view program_text) {
  return fmt::format("```{}\n{}\n```", lang::kProgramFenceTag, program_text);
}

std::vector<ChatTurn> initial_conversation(const PromptContext& ctx) {
  return {
      {Role::System, render_prompt(PromptKind::LlmSystem, ctx), {}},
      {Role::User, render_prompt(PromptKind::LlmInitial, ctx), {}},
  };
}

std::vector<ChatTurn> review_conversation(const PromptContext& ctx, const std::string& current_program) {
  auto msgs = initial_conversation(ctx);
  msgs.push_back({Role::Assistant, fence_program(current_program), {}});
  msgs.push_back({Role::User, render_prompt(PromptKind::LlmReview, ctx), {}});
  return msgs;
}

std::vector<ChatTurn> single_level_conversation(const PromptContext& ctx, const std::vector<Media>& expert,
                                                const std::vector<Media>& learner) {
  std::vector<Media> media = expert;
  media.insert(media.end(), learner.begin(), learner.end());
  return {
      {Role::System, render_prompt(PromptKind::LlmSystem, ctx), {}},
      {Role::User, render_prompt(PromptKind::SingleLevelDirect, ctx), std::move(media)},
  };
}

std::vector<ChatTurn> error_conversation(const std::vector<ChatTurn>& failed, const std::string& failed_reply,
                                         const PromptContext& ctx) {
  std::vector<ChatTurn> msgs;
  if (!failed.empty() && failed.front().role == Role::System) msgs.push_back(failed.front());
  for (auto it = failed.rbegin(); it != failed.rend(); ++it) {
    if (it->role == Role::User) {
      msgs.push_back(*it);
      break;
    }
  }
  msgs.push_back({Role::Assistant, failed_reply, {}});
  msgs.push_back({Role::User, render_prompt(PromptKind::LlmError, ctx), {}});
  return msgs;
}

Generation generate_program(Session& session, std::vector<ChatTurn> conversation, const ObservationSchema& schema,
                            const CallOptions& options) {
  Generation gen;
  gen.conversation = conversation;
  gen.reply = session.call(std::move(conversation), options);
  auto block = extract_program_block(gen.reply);
  if (!block) {
    gen.error = GenerationError{GenerationError::Kind::Extraction, block.error().message, std::nullopt};
    return gen;
  }
  auto program = lang::parse_program(*block);
  if (!program) {
    gen.error = GenerationError{GenerationError::Kind::Lang, program.error().message, program.error()};
    return gen;
  }
  if (auto err = lang::validate_program(*program, schema)) {
    gen.error = GenerationError{GenerationError::Kind::Lang, err->message, *err};
    return gen;
  }
  gen.program = std::move(*program);
  return gen;
}

}  // namespace rwl::feedback

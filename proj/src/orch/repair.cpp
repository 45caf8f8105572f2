#include "rwl/orch/repair.hpp"

#include <fmt/format.h>

namespace rwl::orch {

Acquired repair_program(RepairContext& ctx, std::vector<feedback::ChatTurn> failed_conversation,
                        std::string failed_reply, std::string error, int budget) {
  Acquired out;
  out.conversation = failed_conversation;
  for (int attempt = 0; attempt < budget; ++attempt) {
    feedback::PromptContext pc = ctx.prompt;
    pc.error_message = error;
    auto conversation = feedback::error_conversation(failed_conversation, failed_reply, pc);
    RepairAttempt rec;
    rec.prompt = conversation.back().text;
    rec.error = error;

    feedback::CallOptions opts = ctx.options;
    opts.purpose = "repair";
    feedback::Generation gen;
    try {
      gen = feedback::generate_program(ctx.session, std::move(conversation), ctx.schema, opts);
    } catch (const feedback::BackendError& e) {
      rec.outcome = e.what();
      out.repairs.push_back(std::move(rec));
      out.failure = e.what();
      return out;
    }
    rec.reply = gen.reply;

    std::optional<std::string> next_error;
    if (gen.error) {
      next_error = gen.error->message;
    } else if (ctx.smoke) {
      next_error = ctx.smoke(*gen.program);
    }
    if (!next_error) {
      rec.outcome = "accepted";
      out.repairs.push_back(std::move(rec));
      out.program = std::move(gen.program);
      out.reply = gen.reply;
      return out;
    }
    rec.outcome = *next_error;
    out.repairs.push_back(std::move(rec));
    error = *next_error;
    failed_reply = gen.reply;
  }
  out.failure = fmt::format("repair budget of {} attempts exhausted; last error: {}", budget, error);
  return out;
}

Acquired acquire_program(RepairContext& ctx, std::vector<feedback::ChatTurn> conversation, int budget) {
  feedback::Generation gen = feedback::generate_program(ctx.session, conversation, ctx.schema, ctx.options);
  std::optional<std::string> error;
  if (gen.error) {
    error = gen.error->message;
  } else if (ctx.smoke) {
    error = ctx.smoke(*gen.program);
  }
  if (!error) {
    Acquired out;
    out.program = std::move(gen.program);
    out.conversation = std::move(conversation);
    out.reply = gen.reply;
    return out;
  }
  if (budget <= 0) {
    Acquired out;
    out.conversation = std::move(conversation);
    out.failure = fmt::format("program rejected and no repair attempts are allowed: {}", *error);
    return out;
  }
  return repair_program(ctx, std::move(conversation), gen.reply, *error, budget);
}

}  // namespace rwl::orch

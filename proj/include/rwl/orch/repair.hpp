#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rwl/common/schema.hpp"
#include "rwl/feedback/generate.hpp"
#include "rwl/orch/state.hpp"

namespace rwl::orch {

/// Returns an error message when the program fails a quick execution check.
using SmokeTest = std::function<std::optional<std::string>(const lang::RewardProgram&)>;

struct RepairContext {
  feedback::Session& session;
  ObservationSchema schema;
  feedback::PromptContext prompt;
  feedback::CallOptions options;
  SmokeTest smoke;
};

struct Acquired {
  std::optional<lang::RewardProgram> program;
  std::vector<RepairAttempt> repairs;
  std::string failure;                            // set when no program was obtained
  std::vector<feedback::ChatTurn> conversation;  // the request that started this program
  std::string reply;                              // reply that yielded `program`
};

/// Up to `budget` LlmError rounds seeded with the failed exchange. Each
/// round is recorded, including rounds whose backend call failed.
Acquired repair_program(RepairContext& ctx, std::vector<feedback::ChatTurn> failed_conversation,
                        std::string failed_reply, std::string error, int budget);

/// Sends `conversation`, then repairs the reply if it does not parse,
/// validate, or pass the smoke test.
Acquired acquire_program(RepairContext& ctx, std::vector<feedback::ChatTurn> conversation, int budget);

}  // namespace rwl::orch

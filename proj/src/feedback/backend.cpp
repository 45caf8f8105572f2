#include "rwl/feedback/backend.hpp"

#include <fmt/format.h>

#include "rwl/common/files.hpp"
#include "rwl/feedback/human_queue.hpp"

namespace rwl::feedback {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

void validate(const BackendConfig& c) {
  switch (c.kind) {
    case BackendKind::Http:
      if (c.endpoint.empty()) throw ConfigError("http backend requires an endpoint");
      if (c.model.empty()) throw ConfigError("http backend requires a model name");
      break;
    case BackendKind::Scripted:
      if (c.fixture_dir.empty()) throw ConfigError("scripted backend requires a fixture directory");
      break;
    case BackendKind::Human:
      break;
  }
  if (c.max_retries < 0) throw ConfigError("max_retries must be non-negative");
  if (!(c.timeout_seconds > 0.0)) throw ConfigError("timeout_seconds must be positive");
  if (c.retry_backoff_ms < 0) throw ConfigError("retry_backoff_ms must be non-negative");
}

std::string fixture_file_name(std::size_t index) { return fmt::format("reply_{:04d}.txt", index); }

ScriptedBackend::ScriptedBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string ScriptedBackend::complete(const std::vector<ChatTurn>&, const CallOptions&) {
  const auto path = dir_ / fixture_file_name(next_);
  if (!std::filesystem::exists(path)) {
    throw BackendError(fmt::format("scripted backend: fixtures exhausted ({} not found)", path.string()));
  }
  ++next_;
  return read_text_file(path);
}

HumanBackend::HumanBackend(HumanFeedbackQueue& queue, std::chrono::milliseconds timeout)
    : queue_(queue), timeout_(timeout) {}

std::string HumanBackend::complete(const std::vector<ChatTurn>& messages, const CallOptions& options) {
  HumanRequest req;
  req.run_id = options.run_id;
  req.iteration = options.iteration;
  req.purpose = options.purpose;
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == Role::User) {
      req.prompt = it->text;
      break;
    }
  }
  req.reward_text = options.reward_text;
  req.stats_summary = options.stats_summary;
  req.expert_frame_urls = options.expert_frame_urls;
  req.learner_frame_urls = options.learner_frame_urls;
  auto rec = queue_.request(std::move(req), timeout_);
  if (!rec) {
    throw BackendError(fmt::format("human backend: no feedback received within {} s",
                                   std::chrono::duration<double>(timeout_).count()));
  }
  return rec->raw.empty() ? format_feedback(*rec) : rec->raw;
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config, HumanFeedbackQueue* queue) {
  validate(config);
  switch (config.kind) {
    case BackendKind::Http: return std::make_unique<HttpBackend>(config);
    case BackendKind::Scripted: return std::make_unique<ScriptedBackend>(config.fixture_dir);
    case BackendKind::Human: {
      if (queue == nullptr) throw ConfigError("human backend requires the feedback service");
      const auto ms = std::chrono::milliseconds(static_cast<std::int64_t>(config.timeout_seconds * 1000.0));
      return std::make_unique<HumanBackend>(*queue, ms);
    }
  }
  throw ConfigError("unknown backend kind");
}

}  // namespace rwl::feedback

#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwl::feedback {

class HumanFeedbackQueue;

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);

struct Media {
  std::string media_type;  // e.g. "image/png"
  std::string label;       // e.g. "expert frame 3"
  std::string bytes;
};

struct ChatTurn {
  Role role = Role::User;
  std::string text;
  std::vector<Media> media;  // user turns only
};

/// Extra information for one call. Only the human backend reads the
/// run/iteration fields.
struct CallOptions {
  std::optional<double> temperature;
  std::string purpose;  // "describe", "review", "generate", "repair", ...
  std::string run_id;
  int iteration = 0;
  std::string reward_text;
  std::string stats_summary;
  std::vector<std::string> expert_frame_urls;
  std::vector<std::string> learner_frame_urls;
};

/// Transport failure, fixture exhaustion, or human-queue timeout.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Backend {
 public:
  virtual ~Backend() = default;
  /// Returns the assistant reply text for `messages`.
  virtual std::string complete(const std::vector<ChatTurn>& messages, const CallOptions& options) = 0;
};

enum class BackendKind { Http, Scripted, Human };

struct BackendConfig {
  BackendKind kind = BackendKind::Scripted;
  std::string endpoint;  // http: full URL of the chat-completions route
  std::string model;
  double temperature = 0.0;
  int max_retries = 2;
  std::filesystem::path fixture_dir;  // scripted
  double timeout_seconds = 60.0;      // http request / human wait
  int retry_backoff_ms = 500;         // doubled after each failed attempt

  friend bool operator==(const BackendConfig&, const BackendConfig&) = default;
};

/// Throws ConfigError when required fields for the kind are missing.
void validate(const BackendConfig& config);

/// Replies read in order from reply_0000.txt, reply_0001.txt, ...
class ScriptedBackend final : public Backend {
 public:
  explicit ScriptedBackend(std::filesystem::path dir);
  std::string complete(const std::vector<ChatTurn>& messages, const CallOptions& options) override;
  std::size_t consumed() const { return next_; }

 private:
  std::filesystem::path dir_;
  std::size_t next_ = 0;
};

class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(BackendConfig config);
  std::string complete(const std::vector<ChatTurn>& messages, const CallOptions& options) override;

  /// Request document for `messages` (exposed for tests).
  std::string request_body(const std::vector<ChatTurn>& messages, double temperature) const;

 private:
  BackendConfig config_;
};

/// Posts a pending request to the queue and blocks for the submission.
class HumanBackend final : public Backend {
 public:
  HumanBackend(HumanFeedbackQueue& queue, std::chrono::milliseconds timeout);
  std::string complete(const std::vector<ChatTurn>& messages, const CallOptions& options) override;

 private:
  HumanFeedbackQueue& queue_;
  std::chrono::milliseconds timeout_;
};

/// `queue` is required for the human kind.
std::unique_ptr<Backend> make_backend(const BackendConfig& config, HumanFeedbackQueue* queue = nullptr);

std::string fixture_file_name(std::size_t index);

}  // namespace rwl::feedback

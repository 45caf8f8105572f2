#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rwl/feedback/reply.hpp"

namespace rwl::feedback {

/// What the human is asked to look at.
struct HumanRequest {
  std::uint64_t id = 0;
  std::string run_id;
  int iteration = 0;
  std::string purpose;
  std::string prompt;
  std::string reward_text;
  std::string stats_summary;
  std::vector<std::string> expert_frame_urls;
  std::vector<std::string> learner_frame_urls;
};

enum class SubmitStatus { Accepted, NothingPending, WrongTarget };

/// Hand-off between a blocked human-mode run and the HTTP service. At most
/// one request is pending; submissions are delivered in arrival order.
class HumanFeedbackQueue {
 public:
  /// Publishes `request` and blocks until a matching submission arrives.
  /// Returns nullopt on timeout (the request is withdrawn).
  std::optional<FeedbackRecord> request(HumanRequest request, std::chrono::milliseconds timeout);

  std::optional<HumanRequest> pending() const;

  SubmitStatus submit(const std::string& run_id, int iteration, FeedbackRecord record);

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::optional<HumanRequest> pending_;
  std::deque<FeedbackRecord> delivered_;
  std::uint64_t next_id_ = 1;
};

}  // namespace rwl::feedback

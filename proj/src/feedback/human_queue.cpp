#include "rwl/feedback/human_queue.hpp"

namespace rwl::feedback {

std::optional<FeedbackRecord> HumanFeedbackQueue::request(HumanRequest req, std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  req.id = next_id_++;
  const std::uint64_t id = req.id;
  pending_ = std::move(req);
  delivered_.clear();
  cv_.notify_all();
  const bool got = cv_.wait_for(lock, timeout, [&] { return !delivered_.empty(); });
  if (pending_ && pending_->id == id) pending_.reset();
  if (!got) return std::nullopt;
  FeedbackRecord rec = std::move(delivered_.front());
  delivered_.pop_front();
  return rec;
}

std::optional<HumanRequest> HumanFeedbackQueue::pending() const {
  std::lock_guard lock(mu_);
  return pending_;
}

SubmitStatus HumanFeedbackQueue::submit(const std::string& run_id, int iteration, FeedbackRecord record) {
  std::lock_guard lock(mu_);
  if (!pending_) return SubmitStatus::NothingPending;
  if (pending_->run_id != run_id || pending_->iteration != iteration) return SubmitStatus::WrongTarget;
  pending_.reset();
  delivered_.push_back(std::move(record));
  cv_.notify_all();
  return SubmitStatus::Accepted;
}

}  // namespace rwl::feedback

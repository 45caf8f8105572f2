#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "rwl/common/clock.hpp"
#include "rwl/feedback/human_queue.hpp"

namespace httplib {
class Server;
}

namespace rwl::service {

/// Read-mostly HTTP view of a runs directory plus the human feedback and
/// preference endpoints.
class ApiServer {
 public:
  /// `queue` may be null when no human-mode run shares this process.
  ApiServer(std::filesystem::path root, feedback::HumanFeedbackQueue* queue, Clock clock = system_clock());
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port.
  /// Returns the bound port; throws IoError when binding fails.
  int start(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void serve(const std::string& host, int port);
  void stop();

  std::filesystem::path preferences_file() const { return root_ / "preferences.jsonl"; }

 private:
  void install_routes();

  std::filesystem::path root_;
  feedback::HumanFeedbackQueue* queue_;
  Clock clock_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::mutex preferences_mu_;
};

}  // namespace rwl::service

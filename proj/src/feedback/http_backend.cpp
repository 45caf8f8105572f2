#include <httplib.h>

#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "rwl/common/digest.hpp"
#include "rwl/common/files.hpp"
#include "rwl/feedback/backend.hpp"

namespace rwl::feedback {

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Url split_url(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError(fmt::format("endpoint '{}' has no scheme", url));
  const std::size_t slash = url.find('/', scheme_end + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

std::string reply_text(const nlohmann::json& j) {
  const auto& content = j.at("choices").at(0).at("message").at("content");
  if (content.is_string()) return content.get<std::string>();
  std::string out;
  for (const auto& part : content) {
    if (part.value("type", "") == "text") out += part.at("text").get<std::string>();
  }
  return out;
}

}  // namespace

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) { validate(config_); }

std::string HttpBackend::request_body(const std::vector<ChatTurn>& messages, double temperature) const {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& turn : messages) {
    nlohmann::json content = nlohmann::json::array();
    content.push_back({{"type", "text"}, {"text", turn.text}});
    for (const auto& m : turn.media) {
      const auto* data = reinterpret_cast<const unsigned char*>(m.bytes.data());
      content.push_back({{"type", "image"},
                         {"media_type", m.media_type},
                         {"data", base64_encode({data, m.bytes.size()})}});
    }
    msgs.push_back({{"role", to_string(turn.role)}, {"content", content}});
  }
  nlohmann::json body = {{"model", config_.model}, {"temperature", temperature}, {"messages", msgs}};
  return body.dump();
}

std::string HttpBackend::complete(const std::vector<ChatTurn>& messages, const CallOptions& options) {
  const Url url = split_url(config_.endpoint);
  const std::string body = request_body(messages, options.temperature.value_or(config_.temperature));

  httplib::Headers headers;
  if (const char* key = std::getenv("REWARD_BACKEND_API_KEY"); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", fmt::format("Bearer {}", key));
  }

  const int attempts = config_.max_retries + 1;
  int backoff = config_.retry_backoff_ms;
  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    httplib::Client client(url.origin);
    const auto timeout = std::chrono::milliseconds(static_cast<std::int64_t>(config_.timeout_seconds * 1000.0));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(url.path, headers, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
    } else if (res->status != 200) {
      last_error = fmt::format("HTTP status {}", res->status);
    } else {
      try {
        return reply_text(nlohmann::json::parse(res->body));
      } catch (const nlohmann::json::exception& e) {
        last_error = fmt::format("malformed response: {}", e.what());
      }
    }
    if (attempt < attempts && backoff > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }
  throw BackendError(fmt::format("http backend: request to {} failed after {} attempts: {}", config_.endpoint,
                                 attempts, last_error));
}

}  // namespace rwl::feedback

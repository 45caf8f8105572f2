#include "rwl/service/server.hpp"

#include <httplib.h>

#include <fmt/format.h>
#include <json.hpp>

#include "rwl/common/files.hpp"
#include "rwl/eval/preferences.hpp"
#include "rwl/feedback/reply.hpp"
#include "rwl/orch/state.hpp"

namespace rwl::service {

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, {{"error", {{"code", code}, {"message", message}}}}, status);
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

bool valid_run_id(const std::string& id) {
  return !id.empty() && id.find('/') == std::string::npos && id.find("..") == std::string::npos;
}

std::optional<double> preference_mean(const std::vector<eval::PreferenceRecord>& all, const std::string& run) {
  std::vector<eval::PreferenceRecord> mine;
  for (const auto& r : all) {
    if (r.run_id() == run) mine.push_back(r);
  }
  if (mine.empty()) return std::nullopt;
  return eval::aggregate_preferences(mine).at(run);
}

json frame_urls(const std::string& run, int iteration, int count) {
  json urls = json::array();
  for (int n = 0; n < count; ++n) urls.push_back(fmt::format("/api/runs/{}/iterations/{}/frames/{}", run, iteration, n));
  return urls;
}

json iteration_summary(const orch::RunState& s, const orch::IterationRecord& r) {
  return {{"index", r.index},
          {"program", r.program_text},
          {"score", opt(r.score)},
          {"normalized_score", opt(r.normalized_score)},
          {"fitness", opt(r.fitness)},
          {"stats_summary", train::summarize_component_stats(r.stats)},
          {"frame_count", r.frames.count},
          {"frame_dt", r.frames.dt},
          {"frame_urls", frame_urls(s.id, r.index, r.frames.count)}};
}

json feedback_json(const std::optional<feedback::FeedbackRecord>& f) {
  if (!f) return nullptr;
  return {{"raw", f->raw},
          {"problems", opt(f->problems)},
          {"rewrite_component", opt(f->rewrite_component)},
          {"remove_component", opt(f->remove_component)},
          {"new_component", opt(f->new_component)}};
}

json repairs_json(const std::vector<orch::RepairAttempt>& repairs) {
  json arr = json::array();
  for (const auto& r : repairs) {
    arr.push_back({{"prompt", r.prompt}, {"error", r.error}, {"reply", r.reply}, {"outcome", r.outcome}});
  }
  return arr;
}

std::optional<std::string> string_field(const json& body, const char* key) {
  if (!body.contains(key) || body.at(key).is_null()) return std::nullopt;
  if (!body.at(key).is_string()) throw std::invalid_argument(fmt::format("field '{}' must be a string", key));
  return body.at(key).get<std::string>();
}

}  // namespace

ApiServer::ApiServer(std::filesystem::path root, feedback::HumanFeedbackQueue* queue, Clock clock)
    : root_(std::move(root)), queue_(queue), clock_(std::move(clock)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
    if (bound < 0) throw IoError(fmt::format("cannot bind {}", host));
  } else if (!server_->bind_to_port(host, port)) {
    throw IoError(fmt::format("cannot bind {}:{}", host, port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void ApiServer::serve(const std::string& host, int port) {
  if (!server_->listen(host, port)) throw IoError(fmt::format("cannot listen on {}:{}", host, port));
}

void ApiServer::stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

void ApiServer::install_routes() {
  auto& srv = *server_;

  srv.Get("/api/runs", [this](const httplib::Request&, httplib::Response& res) {
    const auto prefs = eval::load_preferences(preferences_file());
    json runs = json::array();
    for (const auto& id : orch::list_runs(root_)) {
      try {
        const auto s = orch::load_run(root_, id);
        runs.push_back({{"id", id},
                        {"mode", orch::to_string(s.config.mode)},
                        {"status", orch::to_string(s.status)},
                        {"iterations", s.iterations.size()},
                        {"preference_mean", opt(preference_mean(prefs, id))}});
      } catch (const IoError&) {
        runs.push_back({{"id", id}, {"status", "unreadable"}});
      }
    }
    send_json(res, {{"runs", runs}});
  });

  srv.Get(R"(/api/runs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!valid_run_id(id) || !std::filesystem::is_directory(root_ / id)) {
      return send_error(res, 404, "run_not_found", fmt::format("unknown run '{}'", id));
    }
    const auto s = orch::load_run(root_, id);
    json iters = json::array();
    for (const auto& r : s.iterations) iters.push_back(iteration_summary(s, r));
    send_json(res, {{"id", s.id},
                    {"mode", orch::to_string(s.config.mode)},
                    {"status", orch::to_string(s.status)},
                    {"abort_reason", s.abort_reason},
                    {"task_description", s.config.task_description},
                    {"creature_name", s.config.creature_name},
                    {"description", s.description},
                    {"expert_score", opt(s.expert_score)},
                    {"iterations", iters},
                    {"preference_mean", opt(preference_mean(eval::load_preferences(preferences_file()), id))}});
  });

  srv.Get(R"(/api/runs/([^/]+)/iterations/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const int k = std::stoi(req.matches[2]);
    if (!valid_run_id(id) || !std::filesystem::is_directory(root_ / id)) {
      return send_error(res, 404, "run_not_found", fmt::format("unknown run '{}'", id));
    }
    const auto s = orch::load_run(root_, id);
    for (const auto& r : s.iterations) {
      if (r.index != k) continue;
      json body = iteration_summary(s, r);
      body["stats"] = json::parse(train::stats_to_json(r.stats));
      body["feedback"] = feedback_json(r.feedback);
      body["repairs"] = repairs_json(r.repairs);
      body["selected"] = r.selected ? json(*r.selected) : json(nullptr);
      json cands = json::array();
      for (const auto& c : r.candidates) {
        cands.push_back({{"index", c.index}, {"program", c.program_text}, {"fitness", opt(c.fitness)},
                         {"error", c.error}});
      }
      body["candidates"] = cands;
      body["timestamp"] = r.timestamp;
      return send_json(res, body);
    }
    send_error(res, 404, "iteration_not_found", fmt::format("run '{}' has no iteration {}", id, k));
  });

  auto serve_frame = [](const std::filesystem::path& dir, int n, httplib::Response& res) {
    try {
      const auto manifest = env::read_frame_manifest(dir);
      if (n < 0 || n >= manifest.count) {
        return send_error(res, 404, "frame_not_found", fmt::format("frame {} out of range", n));
      }
      res.set_content(env::encode_png(env::read_frame(dir, n)), "image/png");
    } catch (const IoError& e) {
      send_error(res, 404, "frame_not_found", e.what());
    }
  };

  srv.Get(R"(/api/runs/([^/]+)/iterations/(\d+)/frames/(\d+))",
          [this, serve_frame](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            if (!valid_run_id(id) || !std::filesystem::is_directory(root_ / id)) {
              return send_error(res, 404, "run_not_found", fmt::format("unknown run '{}'", id));
            }
            const auto dir = orch::iteration_dir(root_ / id, std::stoi(req.matches[2])) / "frames";
            serve_frame(dir, std::stoi(req.matches[3]), res);
          });

  srv.Get(R"(/api/runs/([^/]+)/expert/frames/(\d+))",
          [this, serve_frame](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            if (!valid_run_id(id) || !std::filesystem::is_directory(root_ / id)) {
              return send_error(res, 404, "run_not_found", fmt::format("unknown run '{}'", id));
            }
            const auto s = orch::load_run(root_, id);
            serve_frame(s.config.expert_media, std::stoi(req.matches[2]), res);
          });

  srv.Get("/api/pending-feedback", [this](const httplib::Request&, httplib::Response& res) {
    const auto p = queue_ != nullptr ? queue_->pending() : std::nullopt;
    if (!p) return send_json(res, {{"pending", false}});
    send_json(res, {{"pending", true},
                    {"id", p->id},
                    {"run", p->run_id},
                    {"iteration", p->iteration},
                    {"purpose", p->purpose},
                    {"prompt", p->prompt},
                    {"reward_text", p->reward_text},
                    {"stats_summary", p->stats_summary},
                    {"expert_frames", p->expert_frame_urls},
                    {"learner_frames", p->learner_frame_urls}});
  });

  srv.Post(R"(/api/runs/([^/]+)/iterations/(\d+)/feedback)",
           [this](const httplib::Request& req, httplib::Response& res) {
             const std::string id = req.matches[1];
             const int k = std::stoi(req.matches[2]);
             feedback::FeedbackRecord rec;
             try {
               const json body = json::parse(req.body);
               if (!body.is_object()) throw std::invalid_argument("body must be an object");
               rec.problems = string_field(body, "problems");
               rec.rewrite_component = string_field(body, "rewrite_component");
               rec.remove_component = string_field(body, "remove_component");
               rec.new_component = string_field(body, "new_component");
               rec.raw = string_field(body, "raw").value_or("");
             } catch (const std::exception& e) {
               return send_error(res, 400, "malformed_body", e.what());
             }
             if (rec.raw.empty()) rec.raw = feedback::format_feedback(rec);
             if (rec.raw.empty()) return send_error(res, 400, "malformed_body", "feedback is empty");

             const auto status = queue_ != nullptr ? queue_->submit(id, k, rec) : feedback::SubmitStatus::NothingPending;
             if (status == feedback::SubmitStatus::Accepted) return send_json(res, {{"ok", true}});
             if (!valid_run_id(id) || !std::filesystem::is_directory(root_ / id)) {
               return send_error(res, 404, "run_not_found", fmt::format("unknown run '{}'", id));
             }
             send_error(res, 409, "no_pending_feedback",
                        fmt::format("no feedback is pending for run '{}' iteration {}", id, k));
           });

  srv.Post("/api/preferences", [this](const httplib::Request& req, httplib::Response& res) {
    std::optional<eval::PreferenceRecord> rec;
    try {
      const json body = json::parse(req.body);
      if (!body.is_object() || !body.contains("score") || !body.at("score").is_number_integer()) {
        throw std::invalid_argument("score must be an integer");
      }
      rec.emplace(body.at("run").get<std::string>(), body.value("iteration", 0), body.value("rater", ""),
                  body.at("score").get<int>(), clock_());
    } catch (const std::exception& e) {
      return send_error(res, 400, "invalid_preference", e.what());
    }
    if (!valid_run_id(rec->run_id()) || !std::filesystem::is_directory(root_ / rec->run_id())) {
      return send_error(res, 404, "run_not_found", fmt::format("unknown run '{}'", rec->run_id()));
    }
    std::lock_guard lock(preferences_mu_);
    eval::append_preference(preferences_file(), *rec);
    const auto mean = preference_mean(eval::load_preferences(preferences_file()), rec->run_id());
    send_json(res, {{"ok", true}, {"preference_mean", opt(mean)}});
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    } catch (...) {
      send_error(res, 500, "internal", "unknown error");
    }
  });
}

}  // namespace rwl::service

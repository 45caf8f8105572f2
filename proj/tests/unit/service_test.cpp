#include <chrono>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "rwl/common/files.hpp"
#include "rwl/eval/preferences.hpp"
#include "rwl/feedback/human_queue.hpp"
#include "rwl/orch/runner.hpp"
#include "rwl/orch/state.hpp"
#include "rwl/service/cli.hpp"
#include "rwl/service/server.hpp"

namespace rwl::service {
namespace {

using nlohmann::json;
using namespace std::chrono_literals;

// Interval at which the web UI polls for pending feedback.
constexpr auto kPollInterval = 1s;

orch::RunnerOptions options(const std::filesystem::path& root, feedback::HumanFeedbackQueue* q = nullptr) {
  orch::RunnerOptions o;
  o.root = root;
  o.clock = fixed_clock();
  o.human_queue = q;
  return o;
}

json get_json(httplib::Client& c, const std::string& path, int expected_status = 200) {
  auto r = c.Get(path);
  EXPECT_TRUE(r) << path;
  if (!r) return {};
  EXPECT_EQ(r->status, expected_status) << path << " " << r->body;
  return json::parse(r->body);
}

int post_status(httplib::Client& c, const std::string& path, const json& body) {
  auto r = c.Post(path, body.dump(), "application/json");
  return r ? r->status : -1;
}

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = testing::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    server_ = std::make_unique<ApiServer>(root_, &queue_, fixed_clock());
    port_ = server_->start("127.0.0.1", 0);
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override { server_->stop(); }

  std::filesystem::path root_;
  feedback::HumanFeedbackQueue queue_;
  std::unique_ptr<ApiServer> server_;
  int port_ = 0;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(ServerTest, ListsAndDescribesRuns) {
  const auto s = orch::execute_run(testing::test_config("scenario"), options(root_));
  const json list = get_json(*client_, "/api/runs");
  ASSERT_EQ(list["runs"].size(), 1u);
  EXPECT_EQ(list["runs"][0]["id"], s.id);
  const json run = get_json(*client_, "/api/runs/" + s.id);
  EXPECT_EQ(run["status"], "completed");
  EXPECT_EQ(run["iterations"].size(), 3u);
  const json it = get_json(*client_, "/api/runs/" + s.id + "/iterations/1");
  EXPECT_EQ(it["program"], s.iterations[1].program_text);
  EXPECT_EQ(it["frame_urls"].size(), 41u);
  get_json(*client_, "/api/runs/nope", 404);
  get_json(*client_, "/api/runs/" + s.id + "/iterations/9", 404);

  auto frame = client_->Get("/api/runs/" + s.id + "/iterations/0/frames/3");
  ASSERT_TRUE(frame);
  EXPECT_EQ(frame->status, 200);
  EXPECT_EQ(frame->get_header_value("Content-Type"), "image/png");
  auto expert = client_->Get("/api/runs/" + s.id + "/expert/frames/0");
  ASSERT_TRUE(expert);
  EXPECT_EQ(expert->status, 200);
  auto missing = client_->Get("/api/runs/" + s.id + "/iterations/0/frames/999");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
}

TEST_F(ServerTest, PreferencesValidatedAndAggregated) {
  const auto s = orch::execute_run(testing::test_config("repair_ok"), options(root_));
  EXPECT_EQ(post_status(*client_, "/api/preferences", {{"run", s.id}, {"iteration", 0}, {"score", 6}}), 400);
  EXPECT_EQ(post_status(*client_, "/api/preferences", {{"run", s.id}, {"score", "high"}}), 400);
  EXPECT_EQ(post_status(*client_, "/api/preferences", {{"run", "unknown"}, {"score", 3}}), 404);
  for (int score : {3, 4, 5}) {
    EXPECT_EQ(post_status(*client_, "/api/preferences", {{"run", s.id}, {"iteration", 0}, {"rater", "r"}, {"score", score}}), 200);
  }
  EXPECT_EQ(get_json(*client_, "/api/runs/" + s.id)["preference_mean"], 4.0);
  EXPECT_EQ(eval::load_preferences(server_->preferences_file()).size(), 3u);
}

TEST_F(ServerTest, FeedbackWithoutPendingRequest) {
  EXPECT_EQ(get_json(*client_, "/api/pending-feedback")["pending"], false);
  EXPECT_EQ(post_status(*client_, "/api/runs/nope/iterations/0/feedback", {{"problems", "x"}}), 404);
  auto r = client_->Post("/api/runs/nope/iterations/0/feedback", "{not json", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
  EXPECT_TRUE(json::parse(r->body).contains("error"));
}

TEST_F(ServerTest, HumanModeRunResumesOnFeedback) {
  orch::RunState result;
  std::thread run([&] { result = orch::execute_run(testing::test_config("human"), options(root_, &queue_)); });

  auto wait_pending = [&](const std::string& purpose) {
    for (int i = 0; i < 2000; ++i) {
      const json p = get_json(*client_, "/api/pending-feedback");
      if (p["pending"] == true && p["purpose"] == purpose) return p;
      std::this_thread::sleep_for(5ms);
    }
    ADD_FAILURE() << "no pending " << purpose;
    return json{};
  };

  const json describe = wait_pending("describe");
  ASSERT_FALSE(describe.empty());
  EXPECT_FALSE(describe["expert_frames"].empty());
  const std::string id = describe["run"];
  EXPECT_EQ(post_status(*client_, "/api/runs/" + id + "/iterations/5/feedback", {{"raw", "x"}}), 409);

  const auto posted = std::chrono::steady_clock::now();
  EXPECT_EQ(post_status(*client_, "/api/runs/" + id + "/iterations/0/feedback",
                        {{"raw", "1. Task: jump forward like a spider."}}),
            200);
  const json review = wait_pending("review");
  EXPECT_LT(std::chrono::steady_clock::now() - posted, kPollInterval + 2s);
  ASSERT_FALSE(review.empty());
  EXPECT_EQ(review["iteration"], 0);
  EXPECT_FALSE(review["learner_frames"].empty());
  EXPECT_FALSE(review["reward_text"].get<std::string>().empty());
  auto png = client_->Get(review["learner_frames"][0].get<std::string>());
  ASSERT_TRUE(png);
  EXPECT_EQ(png->status, 200);

  EXPECT_EQ(post_status(*client_, "/api/runs/" + id + "/iterations/0/feedback",
                        {{"problems", "no jumps"}, {"new_component", "reward vertical speed"}}),
            200);
  run.join();
  ASSERT_EQ(result.status, orch::RunStatus::Completed) << result.abort_reason;
  ASSERT_EQ(result.iterations.size(), 2u);
  EXPECT_EQ(result.description, "1. Task: jump forward like a spider.");
  ASSERT_TRUE(result.iterations[0].feedback.has_value());
  EXPECT_EQ(result.iterations[0].feedback->problems.value_or(""), "no jumps");
}

TEST(CliTest, RunAndReport) {
  const auto root = testing::scratch_dir("cli");
  std::ostringstream out, err;
  const std::string cfg = testing::test_data("configs/scenario.json").string();
  int rc = cli_main({"run", "--config", cfg, "--root", root.string(), "--clock", "fixed"}, out, err);
  EXPECT_EQ(rc, kExitOk) << err.str();
  EXPECT_NE(out.str().find("S = 1.000000"), std::string::npos) << out.str();
  const auto id = orch::list_runs(root).at(0);
  std::ostringstream rep;
  EXPECT_EQ(cli_main({"report", "--root", root.string(), "--run", id}, rep, err), kExitOk);
  EXPECT_NE(rep.str().find("0.103"), std::string::npos) << rep.str();
}

TEST(CliTest, ExitCodes) {
  const auto root = testing::scratch_dir("cli_codes");
  std::ostringstream out, err;
  EXPECT_EQ(cli_main({"run", "--config", "/nonexistent.json", "--root", root.string()}, out, err), kExitConfig);
  EXPECT_EQ(cli_main({"run", "--config", testing::test_data("configs/repair_fail.json").string(), "--root",
                      root.string(), "--clock", "fixed"},
                     out, err),
            kExitAborted);
  EXPECT_NE(cli_main({"frobnicate"}, out, err), kExitOk);
}

TEST(CliTest, EvalPrintsScore) {
  const auto root = testing::scratch_dir("cli_eval");
  std::ostringstream out, err;
  ASSERT_EQ(cli_main({"run", "--config", testing::test_data("configs/scenario.json").string(), "--root", root.string(),
                      "--clock", "fixed"},
                     out, err),
            kExitOk);
  const auto id = orch::list_runs(root).at(0);
  std::ostringstream ev;
  EXPECT_EQ(cli_main({"eval", "--root", root.string(), "--run", id, "--expert-score",
                      testing::repo_data("expert.rwd").string()},
                     ev, err),
            kExitOk)
      << err.str();
  EXPECT_NE(ev.str().find("S = 1.000000"), std::string::npos) << ev.str();
}

}  // namespace
}  // namespace rwl::service

#include "fixtures.hpp"

#include <unistd.h>

#include "rwl/common/files.hpp"
#include "rwl/env/hopper.hpp"
#include "rwl/lang/program.hpp"

namespace rwl::testing {

std::filesystem::path test_data(const std::string& relative) {
  return std::filesystem::path(RWL_TEST_DATA_DIR) / relative;
}

std::filesystem::path repo_data(const std::string& relative) {
  return std::filesystem::path(RWL_DATA_DIR) / relative;
}

orch::RunConfig test_config(const std::string& name) {
  return orch::load_run_config(test_data("configs/" + name + ".json"));
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("rwl-test-" + std::to_string(::getpid())) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::map<std::string, std::string> read_tree(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    out[std::filesystem::relative(entry.path(), dir).generic_string()] = read_text_file(entry.path());
  }
  return out;
}

nlohmann::json frozen_values() {
  return nlohmann::json::parse(read_text_file(test_data("frozen.json")));
}

feedback::PromptContext golden_prompt_context() {
  feedback::PromptContext ctx;
  ctx.creature_name = "spider";
  ctx.task_description = "to make the hopper move forward by performing high forward jumps";
  ctx.env_context = env::env_context_text(env::EnvConfig{});
  ctx.reward_program = "forward = vel_x\njump = 0.5 * abs(vel_z)";
  ctx.epochfreq = 10;
  ctx.stats_summary =
      "forward:\n  mean at epochs [0, 10]: [0.100000, 2.00000]\n  max 4.00000, mean 1.50000, min -1.00000\n";
  ctx.feedback = "1. Problems: The agent does not leave the ground.";
  ctx.error_message = "parse error at line 1, column 18: expected expression";
  ctx.grammar_help = lang::grammar_help_text();
  return ctx;
}

std::filesystem::path golden_path(feedback::PromptKind kind) {
  return test_data("golden/" + std::string(feedback::to_string(kind)) + ".txt");
}

}  // namespace rwl::testing

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rwl/common/clock.hpp"
#include "rwl/feedback/human_queue.hpp"
#include "rwl/orch/state.hpp"
#include "rwl/train/trainer.hpp"

namespace rwl::orch {

struct RunnerOptions {
  std::filesystem::path root = "runs";
  Clock clock = system_clock();
  feedback::HumanFeedbackQueue* human_queue = nullptr;  // required in human mode
  std::function<void(const std::string&)> log;          // progress lines, optional
};

/// Executes the configured mode end to end, persisting after every step.
/// Backend failures and exhausted repair budgets end in an aborted state;
/// configuration problems throw ConfigError.
RunState execute_run(RunConfig config, const RunnerOptions& options);

/// Expert-tuned policy and its score: the denominator of S.
struct ExpertBaseline {
  lang::RewardProgram program;
  train::PolicyParams policy;
  train::Trajectory trajectory;
  double score = 0.0;
};

/// Trains the expert score program with the run's env, train config and
/// seed. Throws ConfigError when it fails or scores <= 0.
ExpertBaseline compute_expert_baseline(const RunConfig& config);

/// Initial state plus every `stride`-th post-step state.
std::vector<env::Frame> render_trajectory(const train::Trajectory& trajectory, const RenderConfig& render);

/// sha256 of the canonical config document.
std::string config_digest(const RunConfig& config);

}  // namespace rwl::orch

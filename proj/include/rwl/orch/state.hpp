#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rwl/env/render.hpp"
#include "rwl/feedback/reply.hpp"
#include "rwl/orch/config.hpp"
#include "rwl/train/rollout.hpp"
#include "rwl/train/stats.hpp"

namespace rwl::orch {

/// One round of the error-repair loop.
struct RepairAttempt {
  std::string prompt;   // the error prompt sent
  std::string error;    // message that triggered this attempt, embedded in `prompt`
  std::string reply;    // empty if the backend failed
  std::string outcome;  // "accepted" or the reply's own error

  friend bool operator==(const RepairAttempt&, const RepairAttempt&) = default;
};

/// A sampled program in the evolutionary baselines.
struct CandidateRecord {
  int index = 0;
  std::string program_text;        // empty if no usable program was obtained
  std::optional<double> fitness;   // nullopt for failed candidates (-inf)
  std::string error;
  std::vector<RepairAttempt> repairs;

  friend bool operator==(const CandidateRecord&, const CandidateRecord&) = default;
};

struct IterationRecord {
  int index = 0;
  std::string program_text;
  std::string policy_json;
  train::ComponentStatsLog stats;
  std::string trajectory_digest;
  std::optional<double> score;             // expert-tuned score of the rollout
  std::optional<double> normalized_score;  // S
  std::optional<double> fitness;
  std::optional<feedback::FeedbackRecord> feedback;
  std::vector<RepairAttempt> repairs;
  std::vector<CandidateRecord> candidates;
  std::optional<int> selected;
  env::FrameManifest frames;
  std::string timestamp;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

enum class RunStatus { Running, Completed, Aborted };

std::string_view to_string(RunStatus status);

struct RunState {
  std::string id;
  RunConfig config;
  std::string description;
  std::optional<double> expert_score;  // denominator of S
  std::vector<IterationRecord> iterations;
  RunStatus status = RunStatus::Running;
  std::string abort_reason;
  int abort_iteration = -1;
  std::vector<RepairAttempt> abort_repairs;
  std::string created;

  friend bool operator==(const RunState&, const RunState&) = default;
};

std::filesystem::path iteration_dir(const std::filesystem::path& run_dir, int index);

/// Writes config.json, description.txt, report.json and every iteration's
/// text files. Frames and trajectories are written by the runner.
void persist_run(const RunState& state, const std::filesystem::path& root);

/// Throws IoError naming the offending path.
RunState load_run(const std::filesystem::path& root, const std::string& id);

/// Run ids under `root` (directories holding a config.json), sorted.
std::vector<std::string> list_runs(const std::filesystem::path& root);

std::string trajectory_to_json(const train::Trajectory& trajectory);
/// Restores states, actions and observations; component values are not stored.
train::Trajectory trajectory_from_json(std::string_view text);

std::string report_json(const RunState& state);

}  // namespace rwl::orch

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "rwl/env/hopper.hpp"
#include "rwl/eval/scoring.hpp"
#include "rwl/feedback/backend.hpp"
#include "rwl/train/trainer.hpp"

namespace rwl::orch {

enum class Mode { Bilevel, Single, Eureka, EurekaGt, Human };

std::string_view to_string(Mode mode);
/// Throws ConfigError for unknown names.
Mode mode_from_string(std::string_view name);

/// Candidates sampled per iteration in the evolutionary baselines.
int default_batch(Mode mode);

struct RenderConfig {
  int frame_stride = 5;  // render every n-th step
  int width = 128;
  int height = 64;
  int frame_cap = 16;    // frames sent to the upper level per video

  friend bool operator==(const RenderConfig&, const RenderConfig&) = default;
};

struct RunConfig {
  Mode mode = Mode::Bilevel;
  int iterations = 5;
  int max_repair_attempts = 3;
  std::optional<int> batch;  // default_batch(mode) when unset
  env::EnvConfig env;
  train::TrainConfig train;  // train.seed is replaced by `seed`
  feedback::BackendConfig upper;
  feedback::BackendConfig lower;
  std::filesystem::path expert_media;          // directory with frames.json
  std::filesystem::path expert_score_program;  // *.rwd, optional
  std::string task_description;
  std::string creature_name;
  std::uint64_t seed = 0;
  std::string encoder_command;  // may use {frames_dir} and {out}
  std::optional<eval::FitnessSpec> fitness;
  double sampling_temperature = 1.0;  // evolutionary candidate sampling
  RenderConfig render;

  int effective_batch() const { return batch.value_or(default_batch(mode)); }
  /// Train config with the run seed applied.
  train::TrainConfig effective_train() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ConfigError describing the first violated constraint.
void validate(const RunConfig& config);

/// Relative paths are resolved against `base_dir`. Unknown keys are errors.
RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Every field, with the effective seed and batch written out.
nlohmann::json run_config_to_json(const RunConfig& config);

/// "<mode>-s<seed>-<first 8 hex of sha256(config json)>".
std::string make_run_id(const RunConfig& config);

}  // namespace rwl::orch

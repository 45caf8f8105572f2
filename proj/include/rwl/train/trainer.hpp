#pragma once

#include <cstdint>
#include <vector>

#include "rwl/common/expected.hpp"
#include "rwl/env/hopper.hpp"
#include "rwl/lang/program.hpp"
#include "rwl/train/policy.hpp"
#include "rwl/train/stats.hpp"

namespace rwl::train {

struct TrainConfig {
  double gamma = 0.99;
  int epochs = 60;
  int epochfreq = 10;
  int population = 32;
  int elites = 6;
  double init_sigma = 1.0;
  double noise_decay = 0.95;
  std::uint64_t seed = 0;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Throws ConfigError when a field is out of range.
void validate(const TrainConfig& config);

struct TrainResult {
  PolicyParams policy;  // best candidate seen across all epochs
  ComponentStatsLog stats;
  std::vector<double> best_history;  // best-so-far return after each epoch
};

/// Lower-level policy optimizer.
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual Expected<TrainResult, lang::RewardLangError> optimize(const env::EnvConfig& env,
                                                                const lang::RewardProgram& program,
                                                                const TrainConfig& config) const = 0;
};

/// Cross-entropy method over a diagonal Gaussian on the flat policy vector.
class CemOptimizer final : public Optimizer {
 public:
  Expected<TrainResult, lang::RewardLangError> optimize(const env::EnvConfig& env,
                                                        const lang::RewardProgram& program,
                                                        const TrainConfig& config) const override;
};

/// Trains with CemOptimizer.
Expected<TrainResult, lang::RewardLangError> train(const env::EnvConfig& env, const lang::RewardProgram& program,
                                                   const TrainConfig& config);

/// Env seed used for every candidate rollout of `epoch`.
std::uint64_t epoch_seed(std::uint64_t seed, int epoch);

}  // namespace rwl::train

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rwl/common/expected.hpp"
#include "rwl/env/hopper.hpp"
#include "rwl/lang/evaluator.hpp"
#include "rwl/train/policy.hpp"

namespace rwl::train {

struct TrajectoryStep {
  env::EnvState state;  // after the step
  env::Action action;
  env::Observation observation;
  std::vector<double> components;  // in component_names order
  double total = 0.0;
};

struct Trajectory {
  env::EnvState initial;
  std::vector<std::string> component_names;
  std::vector<TrajectoryStep> steps;
  double discounted_return = 0.0;
};

/// Runs the policy for the full horizon, scoring each post-step
/// observation with the program. Stops at the first evaluation error.
Expected<Trajectory, lang::RewardLangError> rollout(const env::EnvConfig& env, const PolicyParams& policy,
                                                    const lang::RewardProgram& program, std::uint64_t seed,
                                                    double gamma = 0.99);

Expected<Trajectory, lang::RewardLangError> rollout(const env::EnvConfig& env, const PolicyParams& policy,
                                                    const lang::CompiledProgram& program, std::uint64_t seed,
                                                    double gamma = 0.99);

/// Same return as rollout(...).discounted_return without recording steps.
Expected<double, lang::RewardLangError> rollout_return(const env::EnvConfig& env, const PolicyParams& policy,
                                                       const lang::CompiledProgram& program, std::uint64_t seed,
                                                       double gamma);

/// Compiles against the environment schema.
Expected<lang::CompiledProgram, lang::RewardLangError> compile_for_env(const lang::RewardProgram& program,
                                                                       const env::EnvConfig& env);

}  // namespace rwl::train

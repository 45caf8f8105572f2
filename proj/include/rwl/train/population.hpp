#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rwl/env/hopper.hpp"
#include "rwl/lang/evaluator.hpp"
#include "rwl/train/policy.hpp"

namespace rwl::train {

struct CandidateOutcome {
  double discounted_return = 0.0;
  std::optional<lang::RewardLangError> error;
};

/// One rollout per candidate, all with the same env seed. Parallel over
/// candidates; output index i always belongs to candidate i.
std::vector<CandidateOutcome> evaluate_population(const env::EnvConfig& env,
                                                  const lang::CompiledProgram& program,
                                                  std::span<const PolicyParams> candidates, std::uint64_t seed,
                                                  double gamma);

/// Single-threaded reference for evaluate_population.
std::vector<CandidateOutcome> evaluate_population_serial(const env::EnvConfig& env,
                                                         const lang::CompiledProgram& program,
                                                         std::span<const PolicyParams> candidates,
                                                         std::uint64_t seed, double gamma);

}  // namespace rwl::train

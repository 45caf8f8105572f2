#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "rwl/common/expected.hpp"
#include "rwl/lang/program.hpp"
#include "rwl/train/rollout.hpp"

namespace rwl::eval {

/// Undiscounted sum of the program's total over every trajectory step.
Expected<double, lang::RewardLangError> expert_score(const train::Trajectory& trajectory,
                                                     const lang::RewardProgram& program);

/// candidate / expert. Throws ConfigError unless expert > 0.
double normalized_expert_score(double candidate, double expert);

enum class FitnessTask { SpiderWalking, SpiderJumping, HumanRunning, HumanSplitting, DogHopping };

std::string_view to_string(FitnessTask task);
/// Accepts the snake_case tags ("spider_walking", ...). Throws ConfigError.
FitnessTask fitness_task_from_string(std::string_view tag);

struct FitnessSpec {
  FitnessTask task = FitnessTask::SpiderWalking;
  double v_target = 1.0;  // dog_hopping only

  friend bool operator==(const FitnessSpec&, const FitnessSpec&) = default;
};

/// Per-step fitness expression over the hopper channels.
std::string fitness_program_text(const FitnessSpec& spec);

/// Mean over steps of the per-step fitness expression.
Expected<double, lang::RewardLangError> eureka_fitness(const train::Trajectory& trajectory,
                                                       const FitnessSpec& spec);

/// Index of the largest value; ties go to the lowest index. -inf marks a
/// failed candidate. Throws std::invalid_argument when empty or all -inf.
std::size_t select_best(std::span<const double> fitness);

}  // namespace rwl::eval

#include "rwl/eval/scoring.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "rwl/common/files.hpp"
#include "rwl/env/hopper.hpp"

namespace rwl::eval {

namespace {

// Sum (or mean) of the program total over the trajectory's observations.
Expected<double, lang::RewardLangError> accumulate(const train::Trajectory& traj, const lang::RewardProgram& program,
                                                   bool mean) {
  const auto names = env::observation_schema(env::EnvConfig{}).names();
  auto compiled = lang::CompiledProgram::compile(program, names);
  if (!compiled) return unexpected(std::move(compiled.error()));
  std::vector<double> components(compiled->component_count());
  double sum = 0.0;
  for (const auto& step : traj.steps) {
    const auto obs = step.observation.values();
    auto total = compiled->evaluate(obs, components);
    if (!total) return unexpected(std::move(total.error()));
    sum += *total;
  }
  if (mean && !traj.steps.empty()) return sum / static_cast<double>(traj.steps.size());
  return sum;
}

std::string number_text(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, std::fabs(v));
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return v < 0 ? "(-" + s + ")" : s;
}

}  // namespace

Expected<double, lang::RewardLangError> expert_score(const train::Trajectory& trajectory,
                                                     const lang::RewardProgram& program) {
  return accumulate(trajectory, program, false);
}

double normalized_expert_score(double candidate, double expert) {
  if (!(expert > 0.0)) {
    throw ConfigError(fmt::format("expert score must be positive to normalise (got {})", expert));
  }
  return candidate / expert;
}

std::string_view to_string(FitnessTask task) {
  switch (task) {
    case FitnessTask::SpiderWalking: return "spider_walking";
    case FitnessTask::SpiderJumping: return "spider_jumping";
    case FitnessTask::HumanRunning: return "human_running";
    case FitnessTask::HumanSplitting: return "human_splitting";
    case FitnessTask::DogHopping: return "dog_hopping";
  }
  return "?";
}

FitnessTask fitness_task_from_string(std::string_view tag) {
  for (auto t : {FitnessTask::SpiderWalking, FitnessTask::SpiderJumping, FitnessTask::HumanRunning,
                 FitnessTask::HumanSplitting, FitnessTask::DogHopping}) {
    if (to_string(t) == tag) return t;
  }
  throw ConfigError(fmt::format("unknown fitness task '{}'", tag));
}

std::string fitness_program_text(const FitnessSpec& spec) {
  switch (spec.task) {
    case FitnessTask::SpiderWalking:
    case FitnessTask::HumanRunning:
      return "fitness = vel_x";
    case FitnessTask::SpiderJumping:
      return "fitness = vel_x + abs(vel_z)";
    case FitnessTask::HumanSplitting:
      return "fitness = -(abs(pitch) + abs(ang_vel))";
    case FitnessTask::DogHopping:
      return fmt::format("fitness = -(abs(vel_x - {}) + abs(ang_vel))", number_text(spec.v_target));
  }
  throw ConfigError("unknown fitness task");
}

Expected<double, lang::RewardLangError> eureka_fitness(const train::Trajectory& trajectory,
                                                       const FitnessSpec& spec) {
  auto program = lang::parse_program(fitness_program_text(spec));
  if (!program) return unexpected(std::move(program.error()));
  return accumulate(trajectory, *program, true);
}

std::size_t select_best(std::span<const double> fitness) {
  if (fitness.empty()) throw std::invalid_argument("select_best: no candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < fitness.size(); ++i) {
    if (fitness[i] > fitness[best]) best = i;
  }
  if (fitness[best] == -std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("select_best: every candidate failed");
  }
  return best;
}

}  // namespace rwl::eval

#include "rwl/train/rollout.hpp"

namespace rwl::train {

namespace {

// Shared loop so the recording and return-only paths cannot drift apart.
template <class OnStep>
Expected<double, lang::RewardLangError> run(const env::EnvConfig& env, const PolicyParams& policy,
                                            const lang::CompiledProgram& program, std::uint64_t seed, double gamma,
                                            env::EnvState& state, std::vector<double>& components,
                                            OnStep&& on_step) {
  state = env::reset(env, seed);
  auto obs = env::observe(state, env).values();
  components.assign(program.component_count(), 0.0);
  double ret = 0.0;
  double discount = 1.0;
  for (int t = 0; t < env.horizon; ++t) {
    const env::Action action = policy.act(obs);
    const env::StepResult next = env::step(state, action, env);
    obs = next.observation.values();
    auto total = program.evaluate(obs, components);
    if (!total) return unexpected(std::move(total.error()));
    ret += discount * *total;
    discount *= gamma;
    state = next.state;
    on_step(action, next, *total);
  }
  return ret;
}

}  // namespace

Expected<lang::CompiledProgram, lang::RewardLangError> compile_for_env(const lang::RewardProgram& program,
                                                                       const env::EnvConfig& env) {
  const auto names = env::observation_schema(env).names();
  return lang::CompiledProgram::compile(program, names);
}

Expected<Trajectory, lang::RewardLangError> rollout(const env::EnvConfig& env, const PolicyParams& policy,
                                                    const lang::RewardProgram& program, std::uint64_t seed,
                                                    double gamma) {
  auto compiled = compile_for_env(program, env);
  if (!compiled) return unexpected(std::move(compiled.error()));
  return rollout(env, policy, *compiled, seed, gamma);
}

Expected<Trajectory, lang::RewardLangError> rollout(const env::EnvConfig& env, const PolicyParams& policy,
                                                    const lang::CompiledProgram& program, std::uint64_t seed,
                                                    double gamma) {
  Trajectory traj;
  traj.component_names = program.component_names();
  traj.initial = env::reset(env, seed);
  traj.steps.reserve(static_cast<std::size_t>(env.horizon));
  env::EnvState state;
  std::vector<double> components;
  auto ret = run(env, policy, program, seed, gamma, state, components,
                 [&](const env::Action& action, const env::StepResult& next, double total) {
                   traj.steps.push_back({next.state, action, next.observation, components, total});
                 });
  if (!ret) return unexpected(std::move(ret.error()));
  traj.discounted_return = *ret;
  return traj;
}

Expected<double, lang::RewardLangError> rollout_return(const env::EnvConfig& env, const PolicyParams& policy,
                                                       const lang::CompiledProgram& program, std::uint64_t seed,
                                                       double gamma) {
  env::EnvState state;
  std::vector<double> components;
  return run(env, policy, program, seed, gamma, state, components,
             [](const env::Action&, const env::StepResult&, double) {});
}

}  // namespace rwl::train

#include "rwl/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "rwl/common/files.hpp"
#include "rwl/train/population.hpp"
#include "rwl/train/rollout.hpp"

namespace rwl::train {

void validate(const TrainConfig& c) {
  auto fail = [](std::string_view msg) { throw ConfigError(fmt::format("train config: {}", msg)); };
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) fail("gamma must lie in (0, 1)");
  if (c.epochs < 1) fail("epochs must be at least 1");
  if (c.epochfreq < 1) fail("epochfreq must be at least 1");
  if (c.population < 1) fail("population must be at least 1");
  if (c.elites < 1 || c.elites > c.population) fail("elites must lie in [1, population]");
  if (!(c.init_sigma > 0.0) || !std::isfinite(c.init_sigma)) fail("init_sigma must be positive");
  if (!(c.noise_decay > 0.0 && c.noise_decay <= 1.0)) fail("noise_decay must lie in (0, 1]");
}

std::uint64_t epoch_seed(std::uint64_t seed, int epoch) {
  return seed * 1000003ULL + static_cast<std::uint64_t>(epoch);
}

Expected<TrainResult, lang::RewardLangError> CemOptimizer::optimize(const env::EnvConfig& env,
                                                                    const lang::RewardProgram& program,
                                                                    const TrainConfig& config) const {
  env::validate(env);
  validate(config);
  auto compiled = compile_for_env(program, env);
  if (!compiled) return unexpected(std::move(compiled.error()));

  constexpr std::size_t D = PolicyParams::kDim;
  const auto n = static_cast<std::size_t>(config.population);
  const auto n_elite = static_cast<std::size_t>(config.elites);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<double, D> mu{};
  std::array<double, D> sigma;
  sigma.fill(config.init_sigma);

  TrainResult result;
  result.stats.component_names = compiled->component_names();
  double best_return = -std::numeric_limits<double>::infinity();

  const std::vector<int> checkpoints = checkpoint_epochs(config.epochs, config.epochfreq);
  std::size_t next_checkpoint = 0;
  auto record = [&](int epoch) -> std::optional<lang::RewardLangError> {
    if (next_checkpoint >= checkpoints.size() || checkpoints[next_checkpoint] != epoch) return std::nullopt;
    ++next_checkpoint;
    auto traj = rollout(env, PolicyParams::from_flat(mu), *compiled, config.seed, config.gamma);
    if (!traj) return std::move(traj.error());
    result.stats.checkpoints.push_back({epoch, compute_component_stats({&*traj})});
    return std::nullopt;
  };

  if (auto err = record(0)) return unexpected(std::move(*err));

  std::vector<PolicyParams> candidates(n);
  std::vector<std::size_t> order(n);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (auto& c : candidates) {
      std::array<double, D> flat;
      for (std::size_t d = 0; d < D; ++d) flat[d] = mu[d] + sigma[d] * normal(rng);
      c = PolicyParams::from_flat(flat);
    }
    const auto outcomes =
        evaluate_population(env, *compiled, candidates, epoch_seed(config.seed, epoch), config.gamma);
    for (const auto& o : outcomes) {
      if (o.error) return unexpected(*o.error);
    }

    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return outcomes[a].discounted_return > outcomes[b].discounted_return;
    });
    if (outcomes[order[0]].discounted_return > best_return) {
      best_return = outcomes[order[0]].discounted_return;
      result.policy = candidates[order[0]];
    }
    result.best_history.push_back(best_return);

    const double floor_sigma = config.init_sigma * std::pow(config.noise_decay, epoch + 1);
    for (std::size_t d = 0; d < D; ++d) {
      double sum = 0.0;
      for (std::size_t k = 0; k < n_elite; ++k) sum += candidates[order[k]].flatten()[d];
      const double m = sum / static_cast<double>(n_elite);
      double var = 0.0;
      for (std::size_t k = 0; k < n_elite; ++k) {
        const double dev = candidates[order[k]].flatten()[d] - m;
        var += dev * dev;
      }
      var /= static_cast<double>(n_elite);
      mu[d] = m;
      sigma[d] = std::sqrt(var + floor_sigma * floor_sigma);
    }

    if (auto err = record(epoch + 1)) return unexpected(std::move(*err));
  }
  return result;
}

Expected<TrainResult, lang::RewardLangError> train(const env::EnvConfig& env, const lang::RewardProgram& program,
                                                   const TrainConfig& config) {
  return CemOptimizer{}.optimize(env, program, config);
}

}  // namespace rwl::train

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "rwl/common/files.hpp"
#include "rwl/train/policy.hpp"
#include "rwl/train/population.hpp"
#include "rwl/train/rollout.hpp"
#include "rwl/train/stats.hpp"
#include "rwl/train/trainer.hpp"

namespace rwl::train {
namespace {

lang::RewardProgram program(std::string_view src) {
  auto p = lang::parse_program(src);
  EXPECT_TRUE(p.has_value());
  return *p;
}

PolicyParams random_policy(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  std::array<double, PolicyParams::kDim> flat{};
  for (auto& v : flat) v = n(rng);
  return PolicyParams::from_flat(flat);
}

double brute_force_return(const Trajectory& t, double gamma) {
  double sum = 0.0;
  for (std::size_t i = 0; i < t.steps.size(); ++i) sum += std::pow(gamma, static_cast<double>(i)) * t.steps[i].total;
  return sum;
}

TrainConfig small_config(std::uint64_t seed) {
  TrainConfig c;
  c.epochs = 8;
  c.epochfreq = 3;
  c.population = 12;
  c.elites = 3;
  c.seed = seed;
  return c;
}

TEST(PolicyTest, FlattenRoundTrip) {
  std::mt19937_64 rng(1);
  const PolicyParams p = random_policy(rng);
  EXPECT_EQ(PolicyParams::from_flat(p.flatten()), p);
}

TEST(PolicyTest, ActionsBounded) {
  std::mt19937_64 rng(2);
  const PolicyParams p = random_policy(rng, 10.0);
  std::array<double, PolicyParams::kCols> obs{};
  obs.fill(3.0);
  const auto a = p.act(obs);
  EXPECT_LE(std::fabs(a.thrust), 1.0);
  EXPECT_LE(std::fabs(a.torque), 1.0);
}

TEST(PolicyTest, JsonRoundTrip) {
  std::mt19937_64 rng(3);
  const PolicyParams p = random_policy(rng);
  const auto loaded = policy_from_json(policy_to_json(p, 42, "abc"));
  EXPECT_EQ(loaded.params, p);
  EXPECT_EQ(loaded.seed, 42u);
  EXPECT_EQ(loaded.config_digest, "abc");
  EXPECT_THROW(policy_from_json("{\"W\": 1}"), IoError);
}

TEST(RolloutTest, ZeroPolicyAtRest) {
  const env::EnvConfig ec;
  auto t = rollout(ec, PolicyParams{}, program("r = vel_x"), 0);
  ASSERT_TRUE(t.has_value());
  ASSERT_EQ(t->steps.size(), 200u);
  for (const auto& s : t->steps) EXPECT_EQ(s.components[0], 0.0);
  EXPECT_EQ(t->discounted_return, 0.0);
}

TEST(RolloutTest, DiscountedReturnMatchesBruteForce) {
  const env::EnvConfig ec;
  std::mt19937_64 rng(4);
  const auto p = program("forward = vel_x\njump = 0.5 * abs(vel_z)\nspin = -0.1 * abs(ang_vel)");
  for (int i = 0; i < 50; ++i) {
    const double gamma = std::uniform_real_distribution<double>(0.5, 1.0)(rng);
    auto t = rollout(ec, random_policy(rng), p, rng(), gamma);
    ASSERT_TRUE(t.has_value());
    EXPECT_NEAR(t->discounted_return, brute_force_return(*t, gamma), 1e-9);
  }
}

TEST(RolloutTest, Deterministic) {
  const env::EnvConfig ec;
  std::mt19937_64 rng(5);
  const PolicyParams pol = random_policy(rng);
  auto a = rollout(ec, pol, program("r = vel_x"), 9);
  auto b = rollout(ec, pol, program("r = vel_x"), 9);
  ASSERT_EQ(a->steps.size(), b->steps.size());
  for (std::size_t i = 0; i < a->steps.size(); ++i) {
    EXPECT_EQ(a->steps[i].state, b->steps[i].state);
    EXPECT_EQ(a->steps[i].total, b->steps[i].total);
  }
}

TEST(RolloutTest, ReturnOnlyPathAgrees) {
  const env::EnvConfig ec;
  std::mt19937_64 rng(6);
  const auto p = program("r = vel_x + up_proj");
  auto compiled = compile_for_env(p, ec);
  ASSERT_TRUE(compiled.has_value());
  for (int i = 0; i < 10; ++i) {
    const PolicyParams pol = random_policy(rng);
    auto full = rollout(ec, pol, *compiled, 3, 0.97);
    auto fast = rollout_return(ec, pol, *compiled, 3, 0.97);
    EXPECT_EQ(full->discounted_return, *fast);
  }
}

TEST(PopulationTest, ParallelMatchesSerial) {
  const env::EnvConfig ec;
  std::mt19937_64 rng(7);
  auto compiled = compile_for_env(program("r = vel_x - abs(ang_vel)\nz = where(vel_x > 1, 1.0 / vel_x, 0)"), ec);
  std::vector<PolicyParams> pop;
  for (int i = 0; i < 64; ++i) pop.push_back(random_policy(rng));
  const auto par = evaluate_population(ec, *compiled, pop, 17, 0.99);
  const auto ser = evaluate_population_serial(ec, *compiled, pop, 17, 0.99);
  ASSERT_EQ(par.size(), ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(par[i].discounted_return),
              std::bit_cast<std::uint64_t>(ser[i].discounted_return));
    EXPECT_EQ(par[i].error.has_value(), ser[i].error.has_value());
  }
}

TEST(StatsTest, CheckpointEpochs) {
  EXPECT_EQ(checkpoint_epochs(60, 10), (std::vector<int>{0, 10, 20, 30, 40, 50, 60}));
  EXPECT_EQ(checkpoint_epochs(7, 3), (std::vector<int>{0, 3, 7}));
  EXPECT_EQ(checkpoint_epochs(3, 5), (std::vector<int>{3}));
}

TEST(StatsTest, RecomputedFromSteps) {
  const env::EnvConfig ec;
  std::mt19937_64 rng(8);
  const auto p = program("a = vel_x\nb = abs(vel_z)\nc = up_proj");
  std::vector<Trajectory> trajs;
  for (int i = 0; i < 5; ++i) trajs.push_back(*rollout(ec, random_policy(rng), p, i));
  std::vector<const Trajectory*> ptrs;
  for (const auto& t : trajs) ptrs.push_back(&t);
  const auto stats = compute_component_stats(ptrs);
  ASSERT_EQ(stats.size(), 3u);
  for (std::size_t c = 0; c < 3; ++c) {
    double lo = INFINITY, hi = -INFINITY, sum = 0.0;
    std::size_t n = 0;
    for (const auto& t : trajs) {
      for (const auto& s : t.steps) {
        lo = std::min(lo, s.components[c]);
        hi = std::max(hi, s.components[c]);
        sum += s.components[c];
        ++n;
      }
    }
    EXPECT_NEAR(stats[c].min, lo, 1e-9);
    EXPECT_NEAR(stats[c].max, hi, 1e-9);
    EXPECT_NEAR(stats[c].mean, sum / static_cast<double>(n), 1e-9);
    EXPECT_LE(stats[c].min, stats[c].mean);
    EXPECT_LE(stats[c].mean, stats[c].max);
  }
}

TEST(StatsTest, SummaryFormat) {
  ComponentStatsLog log;
  log.component_names = {"forward"};
  log.checkpoints.push_back({0, {ComponentStat{3.0, 2.0, 1.0}}});
  const std::string text = summarize_component_stats(log);
  EXPECT_NE(text.find("forward"), std::string::npos);
  EXPECT_NE(text.find("2.00000"), std::string::npos);
  EXPECT_EQ(text, summarize_component_stats(log));
  EXPECT_THROW(summarize_component_stats(ComponentStatsLog{}), std::invalid_argument);
}

TEST(StatsTest, JsonRoundTrip) {
  ComponentStatsLog log;
  log.component_names = {"a", "b"};
  log.checkpoints.push_back({0, {ComponentStat{1.5, 0.25, -3.0}, ComponentStat{0.1, 0.1, 0.1}}});
  log.checkpoints.push_back({4, {ComponentStat{2.5, 1.0 / 3.0, -1.0}, ComponentStat{0.2, 0.2, 0.2}}});
  EXPECT_EQ(stats_from_json(stats_to_json(log)), log);
}

TEST(TrainerTest, CheckpointCountForRandomPairs) {
  const env::EnvConfig ec;
  std::mt19937_64 rng(9);
  const auto p = program("r = vel_x");
  for (int i = 0; i < 20; ++i) {
    TrainConfig c = small_config(rng());
    c.epochs = std::uniform_int_distribution<int>(1, 25)(rng);
    c.epochfreq = std::uniform_int_distribution<int>(1, 12)(rng);
    c.population = 6;
    c.elites = 2;
    auto r = train(ec, p, c);
    ASSERT_TRUE(r.has_value());
    EXPECT_EQ(r->stats.checkpoints.size(), static_cast<std::size_t>(c.epochs / c.epochfreq + 1))
        << c.epochs << "/" << c.epochfreq;
    EXPECT_EQ(r->stats.checkpoints.back().epoch, c.epochs);
  }
}

TEST(TrainerTest, DefaultsGiveSevenCheckpoints) {
  TrainConfig c;
  c.seed = 1;
  auto r = train(env::EnvConfig{}, program("r = vel_x"), c);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->stats.checkpoints.size(), 7u);
}

TEST(TrainerTest, BestSoFarNonDecreasing) {
  auto r = train(env::EnvConfig{}, program("r = vel_x + up_proj"), small_config(2));
  ASSERT_TRUE(r.has_value());
  ASSERT_EQ(r->best_history.size(), 8u);
  for (std::size_t i = 1; i < r->best_history.size(); ++i) EXPECT_GE(r->best_history[i], r->best_history[i - 1]);
}

TEST(TrainerTest, Deterministic) {
  const auto p = program("r = vel_x - abs(pitch)");
  auto a = train(env::EnvConfig{}, p, small_config(5));
  auto b = train(env::EnvConfig{}, p, small_config(5));
  EXPECT_EQ(a->policy, b->policy);
  EXPECT_EQ(a->stats, b->stats);
  EXPECT_EQ(a->best_history, b->best_history);
}

TEST(TrainerTest, EvalErrorSurfacesUnchanged) {
  auto r = train(env::EnvConfig{}, program("r = 1.0/vel_x"), TrainConfig{});
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(r.error().kind, lang::ErrorKind::Eval);
  EXPECT_EQ(r.error().component, "r");
  EXPECT_EQ(r.error().message, "evaluation error in component 'r': division by zero");
}

TEST(TrainerTest, RejectsUnknownChannel) {
  auto r = train(env::EnvConfig{}, program("r = speed"), TrainConfig{});
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(r.error().kind, lang::ErrorKind::UnknownIdentifier);
}

TEST(TrainerTest, ConfigValidation) {
  TrainConfig c;
  c.elites = c.population + 1;
  EXPECT_THROW(validate(c), ConfigError);
  c = TrainConfig{};
  c.gamma = 1.5;
  EXPECT_THROW(validate(c), ConfigError);
  c = TrainConfig{};
  c.epochfreq = 0;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(TrainerTest, ForwardVelocityAboveFrozenThreshold) {
  const auto frozen = testing::frozen_values()["trainer"];
  TrainConfig c;
  c.seed = frozen["seed"].get<std::uint64_t>();
  const env::EnvConfig ec;
  const auto p = program(frozen["program"].get<std::string>());
  auto r = train(ec, p, c);
  ASSERT_TRUE(r.has_value());
  auto t = rollout(ec, r->policy, p, c.seed);
  double sum = 0.0;
  for (const auto& s : t->steps) sum += s.observation.vel_x;
  const double mean = sum / static_cast<double>(t->steps.size());
  EXPECT_GT(mean, frozen["threshold"].get<double>());
  EXPECT_GT(mean, 0.5);
}

}  // namespace
}  // namespace rwl::train

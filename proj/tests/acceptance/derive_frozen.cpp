// One-off oracle run that produces tests/data/frozen.json.
//
//   derive_frozen > tests/data/frozen.json
//
// Policies come from the library trainer; everything measured on them is
// recomputed here with the naive interpreter and plain loops.

#include <cmath>
#include <iostream>
#include <map>

#include <fmt/format.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "naive_eval.hpp"
#include "rwl/common/files.hpp"
#include "rwl/feedback/reply.hpp"
#include "rwl/lang/program.hpp"
#include "rwl/train/rollout.hpp"
#include "rwl/train/trainer.hpp"

namespace {

using namespace rwl;

lang::RewardProgram parse_or_die(const std::string& text) {
  auto p = lang::parse_program(text);
  if (!p) throw std::runtime_error(p.error().message);
  return *p;
}

std::map<std::string, double> channels_of(const env::Observation& o) {
  const auto names = env::observation_schema(env::EnvConfig{}).names();
  const auto values = o.values();
  std::map<std::string, double> m;
  for (std::size_t i = 0; i < names.size(); ++i) m[names[i]] = values[i];
  return m;
}

// Policy trained on `trained_with`, rolled out once, scored by `score_with`.
double naive_score(const orch::RunConfig& cfg, const lang::RewardProgram& trained_with,
                   const lang::RewardProgram& score_with) {
  auto result = train::train(cfg.env, trained_with, cfg.effective_train());
  if (!result) throw std::runtime_error(result.error().message);
  auto traj = train::rollout(cfg.env, result->policy, trained_with, cfg.seed);
  if (!traj) throw std::runtime_error(traj.error().message);
  double sum = 0.0;
  for (const auto& s : traj->steps) {
    auto r = testing::naive_evaluate(score_with, channels_of(s.observation));
    if (!r.ok) throw std::runtime_error(r.error);
    sum += r.total;
  }
  return sum;
}

}  // namespace

int main() {
  nlohmann::ordered_json out;

  {
    train::TrainConfig tc;
    tc.seed = 3;
    const env::EnvConfig ec;
    const auto program = parse_or_die("r = vel_x");
    auto result = train::train(ec, program, tc);
    auto traj = train::rollout(ec, result->policy, program, tc.seed);
    double sum = 0.0;
    for (const auto& s : traj->steps) sum += channels_of(s.observation).at("vel_x");
    const double mean = sum / static_cast<double>(traj->steps.size());
    out["trainer"] = {{"program", "r = vel_x"},
                      {"seed", 3},
                      {"observed_mean_vel_x", mean},
                      {"threshold", std::floor(mean * 0.9 * 10.0) / 10.0}};
  }

  {
    const auto cfg = testing::test_config("scenario");
    const auto expert = parse_or_die(read_text_file(cfg.expert_score_program));
    const double expert_score = naive_score(cfg, expert, expert);
    nlohmann::ordered_json s = nlohmann::ordered_json::array();
    for (int i = 0; i < cfg.iterations; ++i) {
      const auto reply = read_text_file(cfg.lower.fixture_dir / fmt::format("reply_{:04d}.txt", i));
      const auto block = feedback::extract_program_block(reply);
      const auto program = parse_or_die(*block);
      s.push_back(naive_score(cfg, program, expert) / expert_score);
    }
    out["scenario"] = {{"expert_score", expert_score}, {"S", s}, {"tolerance", 0.05}};
  }

  std::cout << out.dump(2) << "\n";
  return 0;
}

#include "rwl/train/population.hpp"

#include "rwl/train/rollout.hpp"

namespace rwl::train {

namespace {

CandidateOutcome evaluate_one(const env::EnvConfig& env, const lang::CompiledProgram& program,
                              const PolicyParams& candidate, std::uint64_t seed, double gamma) {
  auto ret = rollout_return(env, candidate, program, seed, gamma);
  if (!ret) return {0.0, std::move(ret.error())};
  return {*ret, std::nullopt};
}

}  // namespace

std::vector<CandidateOutcome> evaluate_population(const env::EnvConfig& env,
                                                  const lang::CompiledProgram& program,
                                                  std::span<const PolicyParams> candidates, std::uint64_t seed,
                                                  double gamma) {
  std::vector<CandidateOutcome> out(candidates.size());
  const auto n = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = evaluate_one(env, program, candidates[static_cast<std::size_t>(i)], seed, gamma);
  }
  return out;
}

std::vector<CandidateOutcome> evaluate_population_serial(const env::EnvConfig& env,
                                                         const lang::CompiledProgram& program,
                                                         std::span<const PolicyParams> candidates,
                                                         std::uint64_t seed, double gamma) {
  std::vector<CandidateOutcome> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back(evaluate_one(env, program, c, seed, gamma));
  return out;
}

}  // namespace rwl::train

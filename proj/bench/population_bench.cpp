#include <random>

#include <benchmark/benchmark.h>

#include "rwl/train/population.hpp"
#include "rwl/train/rollout.hpp"

namespace {

using namespace rwl;

struct Setup {
  env::EnvConfig env;
  lang::CompiledProgram program;
  std::vector<train::PolicyParams> population;

  explicit Setup(int n) {
    auto parsed = lang::parse_program(
        "forward = clamp(vel_x, 0.0, 3.0)\njump = 2.0 * abs(vel_z)\nupright = up_proj\nspin = -0.5 * abs(ang_vel)");
    program = *train::compile_for_env(*parsed, env);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal;
    for (int i = 0; i < n; ++i) {
      std::array<double, train::PolicyParams::kDim> flat{};
      for (auto& v : flat) v = normal(rng);
      population.push_back(train::PolicyParams::from_flat(flat));
    }
  }
};

void BM_PopulationParallel(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train::evaluate_population(s.env, s.program, s.population, 7, 0.99));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PopulationSerial(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train::evaluate_population_serial(s.env, s.program, s.population, 7, 0.99));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_PopulationParallel)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PopulationSerial)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

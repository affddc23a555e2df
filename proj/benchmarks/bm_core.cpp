#include <benchmark/benchmark.h>

#include "hmmc/cme.hpp"
#include "hmmc/experiments.hpp"
#include "hmmc/mlp.hpp"

namespace {

using namespace hmmc;

struct Random {
  HmmParams params;
  ObsSequence obs;
};

Random random_model(std::size_t q, std::size_t x, std::size_t t) {
  Rng rng(11);
  HmmParams p = random_params(q, x, rng);
  auto [path, obs] = sample_sequence(p, t, rng);
  return {std::move(p), std::move(obs)};
}

void BM_ForwardBackward(benchmark::State& state) {
  const auto m = random_model(state.range(0), 30, state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(forward_backward(m.params, m.obs));
}
BENCHMARK(BM_ForwardBackward)->Args({3, 5})->Args({30, 10})->Args({30, 100});

void BM_PosteriorAt(benchmark::State& state) {
  const auto m = random_model(state.range(0), 30, state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(posterior_at(m.params, m.obs, m.obs.size() / 2));
  }
}
BENCHMARK(BM_PosteriorAt)->Args({3, 5})->Args({30, 10})->Args({30, 100});

void BM_Viterbi(benchmark::State& state) {
  const auto m = random_model(state.range(0), 30, state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(viterbi(m.params, m.obs));
}
BENCHMARK(BM_Viterbi)->Args({3, 5})->Args({30, 10})->Args({30, 100});

void BM_MlpPredict(benchmark::State& state) {
  Rng rng(3);
  Mlp net(300, 16, 8, 0.005, rng);
  AttackVector a{std::vector<int>(10, 7)};
  for (auto _ : state) benchmark::DoNotOptimize(net.predict(a, 30));
}
BENCHMARK(BM_MlpPredict);

void BM_MlpTrain(benchmark::State& state) {
  Rng rng(3);
  Mlp net(300, 16, 8, 0.005, rng);
  AttackVector a{std::vector<int>(10, 7)};
  for (auto _ : state) benchmark::DoNotOptimize(net.train_step(a, 30, 1.0));
}
BENCHMARK(BM_MlpTrain);

void BM_CmeSmallModel(benchmark::State& state) {
  const DesignPoint& d = design_point("sec51-low");
  Rng gen(1);
  const ExperimentInstance inst = generate_instance(d, gen);
  const ProblemSpec spec = d.problem(ProblemKind::StateAttraction);
  CmeConfig cfg;
  cfg.samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_cme(spec, inst.beliefs, inst.observations, cfg, Rng(5)));
  }
}
BENCHMARK(BM_CmeSmallModel)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

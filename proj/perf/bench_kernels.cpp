// Serial against OpenMP variants of the permutation kernels. The second
// argument of each benchmark selects the execution mode (0 serial, 1 parallel).

#include <benchmark/benchmark.h>

#include <cmath>

#include "pemi/bench/experiment.hpp"
#include "pemi/engine.hpp"
#include "pemi/fast.hpp"
#include "pemi/random.hpp"
#include "pemi/rules.hpp"

using namespace pemi;

namespace {

Execution mode(const benchmark::State& state) { return state.range(1) ? Execution::parallel : Execution::serial; }

DataSequence instance(std::size_t t, std::uint64_t seed) {
  SplitMix64 gen(seed);
  std::vector<LabeledPoint> pts(t);
  for (auto& p : pts) {
    const double mu = 4.0 * uniform01(gen) - 2.0;
    p.x = {mu};
    p.y = mu + 3.0 * uniform01(gen) - 1.5;
    p.cutoff = 0.0;
  }
  const LabeledPoint test = pts.back();
  pts.pop_back();
  return DataSequence(std::move(pts), test.x, test.cutoff);
}

const ResidualScore kScore(column(0));
const WeightedPredictionRule kAverage(column(0), WeightedPredictionRule::Mode::average);
const ConstantRule kAlways(true);

void BM_PemiPvalue(benchmark::State& state) {
  const auto seq = instance(static_cast<std::size_t>(state.range(0)), 1);
  const auto perms = sample_permutations(seq, 2000, 2);
  for (auto _ : state) benchmark::DoNotOptimize(pemi_pvalue(0.3, seq, kAverage, kScore, perms, mode(state)));
}

void BM_CovariateSets(benchmark::State& state) {
  const auto seq = instance(static_cast<std::size_t>(state.range(0)), 3);
  const auto perms = sample_permutations(seq, 2000, 4);
  for (auto _ : state) benchmark::DoNotOptimize(covariate_sets(seq, kAlways, kScore, perms, nullptr, mode(state)));
}

void BM_CutoffPairSets(benchmark::State& state) {
  const auto seq = instance(static_cast<std::size_t>(state.range(0)), 5);
  const auto perms = sample_permutations(seq, 2000, 6);
  const ConformalPValueRule rule(column(0), std::make_shared<FixedThreshold>(0.5));
  for (auto _ : state) benchmark::DoNotOptimize(cutoff_pair_sets(seq, rule, kScore, perms, mode(state)));
}

void BM_RunExperiment(benchmark::State& state) {
  bench::ExperimentConfig c;
  c.T = static_cast<std::size_t>(state.range(0));
  c.N = 20;
  c.M = 100;
  c.seed = 7;
  c.rule.kind = "weighted_quantile";
  for (auto _ : state) benchmark::DoNotOptimize(bench::run_experiment(c, mode(state)));
}

}  // namespace

BENCHMARK(BM_PemiPvalue)->ArgsProduct({{20, 80}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CovariateSets)->ArgsProduct({{20, 80}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CutoffPairSets)->ArgsProduct({{20, 80}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RunExperiment)->ArgsProduct({{20}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "transq/closure.hpp"
#include "transq/model_zoo.hpp"
#include "transq/moment_engine.hpp"
#include "transq/simulator.hpp"

using namespace transq;

namespace {

MomentPoint point2(double m0, double m1, double s0, double s1, double r) {
  MomentPoint p{Vector(2), Matrix(2, 2)};
  p.mean << m0, m1;
  p.cov << s0 * s0, r * s0 * s1, r * s0 * s1, s1 * s1;
  return p;
}

void BM_ExpectedKernel(benchmark::State& state) {
  const GaussianClosure closure(static_cast<std::size_t>(state.range(1)));
  const TimeSchedule n = TimeSchedule::constant(200);
  const TimeSchedule one = TimeSchedule::constant(1);
  const RateTerm terms[] = {
      {one, kernel::MinThreshold{0, n}},
      {one, kernel::MinPair{0, 1}},
      {one, kernel::CappedResidual{1, 0, n}},
  };
  const RateTerm& term = terms[state.range(0)];
  const MomentPoint p = point2(195, 20, 8, 4, -0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(closure.expected_kernel(term, 0, p));
  }
  state.SetLabel(std::string(kernel_name(term.kernel)));
}
BENCHMARK(BM_ExpectedKernel)->ArgsProduct({{0, 1, 2}, {32}})->Args({2, 64});

void BM_SolveAdjusted(benchmark::State& state) {
  const Preset p = state.range(0) == 0 ? table1_preset(7) : state.range(0) == 1 ? priority_study() : peer_study();
  SolverConfig cfg;
  cfg.sample_times = p.grid;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_adjusted(p.model, cfg));
  }
}
BENCHMARK(BM_SolveAdjusted)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_SimulatePath(benchmark::State& state) {
  const Preset p = table1_preset(7);
  const PathSimulator sim(p.model);
  std::uint64_t stream = 0;
  for (auto _ : state) {
    RngStream rng(1, stream++);
    benchmark::DoNotOptimize(sim.sample(rng, p.grid));
  }
}
BENCHMARK(BM_SimulatePath)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();

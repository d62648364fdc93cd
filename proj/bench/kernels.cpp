#include <benchmark/benchmark.h>

#include "ncsched/oracle_kernels.hpp"

using namespace ncsched;

namespace {

struct Fixture {
  DetailedSpace space{4};
  Aggregation agg{Scheme::NoTte, 4};
  std::vector<double> loss{0.1, 0.2, 0.3, 0.25};
  DetailedModel model = build_detailed_model(space, agg, loss, StorageRule::Accumulate, Kernel::Serial);
  Chain chain = policy_chain(model, semi_greedy_policy(agg));
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

Kernel kernel_of(const benchmark::State& state) { return state.range(0) == 0 ? Kernel::Serial : Kernel::Parallel; }

void BM_BuildModel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_detailed_model(f.space, f.agg, f.loss, StorageRule::Accumulate, kernel_of(state)));
  }
}

void BM_EvaluateDiscounted(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_discounted(f.chain, 0.99, kernel_of(state)));
}

void BM_LimitingDistribution(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(limiting_distribution(f.chain, 0, kernel_of(state)));
}

}  // namespace

BENCHMARK(BM_BuildModel)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateDiscounted)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LimitingDistribution)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <cstdint>
#include <memory>
#include <utility>

#include "intentgate/generation.hpp"
#include "intentgate/prompt.hpp"
#include "intentgate/replay.hpp"

namespace {

using namespace intentgate;

SyntheticStreamSpec flip_spec(std::size_t events_per_segment) {
  SyntheticStreamSpec spec;
  spec.segments = {{TagDistribution{{{"home", 1.0}}}, events_per_segment},
                   {TagDistribution{{{"garden", 1.0}}}, events_per_segment}};
  spec.seed = 23;
  return spec;
}

// Whole-pipeline replay throughput per gating policy. The drift policy pays
// for an evaluation on every event but only a handful of prompt builds; the
// always policy pays for both everywhere.
void BM_Replay(benchmark::State& state, const char* policy_text) {
  SyntheticStreamSpec spec = flip_spec(static_cast<std::size_t>(state.range(0)) / 2);
  TagCatalog catalog = synthetic_catalog(spec);
  auto [events, shifts] = synth_sessions(spec, catalog);
  (void)shifts;

  PolicySpec policy = PolicySpec::parse(policy_text, DriftConfig{});
  PromptEngine engine(default_pools(), std::make_shared<LinearScorer>());
  MockGenerator gen(catalog, {});
  PipelineConfig pc;
  pc.window = WindowPolicy::by_count(10);

  for (auto _ : state) {
    ReplayTrace trace = replay(spec.user, events, policy, engine, gen, catalog, pc);
    benchmark::DoNotOptimize(trace.records.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(events.size()));
}
BENCHMARK_CAPTURE(BM_Replay, always, "always")->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Replay, every_k_50, "every-k=50")->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Replay, drift_gated, "drift")->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

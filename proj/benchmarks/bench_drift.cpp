#include <benchmark/benchmark.h>

#include <cstdint>
#include <string>
#include <vector>

#include "intentgate/behavior.hpp"
#include "intentgate/drift.hpp"
#include "intentgate/rng.hpp"

namespace {

using namespace intentgate;

TagDistribution uniform_over(std::size_t n, std::size_t offset = 0) {
  TagDistribution d;
  for (std::size_t i = 0; i < n; ++i)
    d.probs["tag" + std::to_string(offset + i)] = 1.0 / static_cast<double>(n);
  return d;
}

// Full fused score (entropy delta + jaccard + JS) for growing support sizes.
// The two distributions half-overlap so none of the terms short-circuits.
void BM_DriftScore(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  TagDistribution p = uniform_over(n);
  TagDistribution q = uniform_over(n, n / 2);
  TagSet zp = p.support();
  TagSet zq = q.support();
  DriftConfig cfg;
  for (auto _ : state) {
    DriftScore s = drift_score(p, zp, q, zq, cfg);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_DriftScore)->Arg(4)->Arg(16)->Arg(64)->Arg(256);

void BM_JsDivergence(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  TagDistribution p = uniform_over(n);
  TagDistribution q = uniform_over(n, n / 2);
  for (auto _ : state) {
    double js = js_divergence(p, q);
    benchmark::DoNotOptimize(js);
  }
}
BENCHMARK(BM_JsDivergence)->Arg(4)->Arg(16)->Arg(64)->Arg(256);

// The per-event evaluation path: window distribution, score against the
// baseline, decide. Measured over the window sizes the gate actually sees.
void BM_ShouldTrigger(benchmark::State& state) {
  auto window_size = static_cast<std::size_t>(state.range(0));
  std::map<std::string, std::string> items;
  for (int i = 0; i < 32; ++i) items["i" + std::to_string(i)] = "t" + std::to_string(i % 8);
  TagCatalog catalog(items);

  SplitMix64 rng(17);
  std::vector<BehaviorEvent> events;
  for (std::size_t i = 0; i < window_size; ++i)
    events.push_back({"i" + std::to_string(rng.next_below(32)),
                      static_cast<ActionType>(rng.next_below(4)),
                      static_cast<int64_t>(i) * 1000});
  BehaviorWindow window{events, WindowPolicy::by_count(window_size)};

  DriftConfig cfg;
  DriftState baseline;
  // Prime the baseline so the loop measures scoring, not the bootstrap.
  baseline = should_trigger(baseline, window, catalog, cfg).second;

  for (auto _ : state) {
    auto [decision, next] = should_trigger(baseline, window, catalog, cfg);
    benchmark::DoNotOptimize(decision);
    benchmark::DoNotOptimize(next);
  }
}
BENCHMARK(BM_ShouldTrigger)->Arg(10)->Arg(50)->Arg(200);

}  // namespace

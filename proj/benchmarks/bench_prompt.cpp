#include <benchmark/benchmark.h>

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "intentgate/behavior.hpp"
#include "intentgate/prompt.hpp"
#include "intentgate/rng.hpp"
#include "intentgate/tokenizer.hpp"

namespace {

using namespace intentgate;

std::string lorem(std::size_t words, uint64_t seed) {
  SplitMix64 rng(seed);
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (!out.empty()) out += ' ';
    out += "word" + std::to_string(rng.next_below(500));
  }
  return out;
}

void BM_TokenCount(benchmark::State& state) {
  std::string text = lorem(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) {
    std::size_t n = token_count(text);
    benchmark::DoNotOptimize(n);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_TokenCount)->Arg(64)->Arg(512)->Arg(4096);

struct BuildFixture {
  TagCatalog catalog;
  std::vector<BehaviorEvent> events;
  PromptEngine engine;

  static TagCatalog make_catalog() {
    std::map<std::string, std::string> items;
    for (int i = 0; i < 64; ++i) items["i" + std::to_string(i)] = "t" + std::to_string(i % 8);
    return TagCatalog(items);
  }

  static PoolSet make_pools() {
    PoolSet pools;
    for (int t = 0; t < 4; ++t) {
      PromptTemplate tm;
      tm.id = "tmpl" + std::to_string(t);
      tm.body = lorem(20, 100 + static_cast<uint64_t>(t)) +
                " {timestamp} context {behavior_sequence} predict the next query";
      tm.affinity = {0.2, 0.1, 0.4, 0.3, 0.5, 0.6, 0.1};
      pools.templates.push_back(std::move(tm));
    }
    for (int c = 0; c < 8; ++c) {
      PromptComponent pc;
      pc.id = "comp" + std::to_string(c);
      pc.text = lorem(12, 200 + static_cast<uint64_t>(c));
      pc.affinity = {0.1, 0.3, 0.2, 0.1, 0.4, 0.2, 0.3};
      pools.components.push_back(std::move(pc));
    }
    return pools;
  }

  explicit BuildFixture(std::size_t session_len)
      : catalog(make_catalog()),
        engine(make_pools(), std::make_shared<LinearScorer>()) {
    SplitMix64 rng(9);
    for (std::size_t i = 0; i < session_len; ++i)
      events.push_back({"i" + std::to_string(rng.next_below(64)),
                        static_cast<ActionType>(rng.next_below(4)),
                        static_cast<int64_t>(i) * 500});
  }
};

// End-to-end build: features, template softmax, component admission, budget
// enforcement, slot instantiation.
void BM_BuildPrompt(benchmark::State& state) {
  auto window_size = static_cast<std::size_t>(state.range(0));
  BuildFixture fx(window_size);
  BehaviorWindow window{fx.events, WindowPolicy::by_count(window_size)};
  ScenarioContext scenario{"feed", {}};
  int64_t now = static_cast<int64_t>(window_size) * 500 + 1000;

  for (auto _ : state) {
    BuiltPrompt built = fx.engine.build(window, fx.catalog, scenario, now);
    benchmark::DoNotOptimize(built.text.data());
  }
}
BENCHMARK(BM_BuildPrompt)->Arg(10)->Arg(50)->Arg(200);

}  // namespace

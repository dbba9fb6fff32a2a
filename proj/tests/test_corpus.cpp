#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <set>
#include <string>

#include "intentgate/corpus.hpp"
#include "intentgate/rng.hpp"

#ifndef INTENTGATE_TEST_DATA_DIR
#define INTENTGATE_TEST_DATA_DIR "tests/data"
#endif

using namespace intentgate;

namespace {

const std::string kData = INTENTGATE_TEST_DATA_DIR;

BehaviorEvent ev(std::string item, ActionType a, int64_t ts) {
  return BehaviorEvent{std::move(item), a, ts};
}

TrainingSample sample(std::string target, SampleSource src = SampleSource::behavior_driven) {
  TrainingSample s;
  s.behavior = {ev("p1", ActionType::purchase, 10)};
  s.target_query = std::move(target);
  s.source = src;
  s.ref_time = 11;
  return s;
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an intentgate::Error");
  return Errc::data;
}

}  // namespace

TEST_CASE("sample source names round-trip") {
  for (auto s : kSampleSources) {
    auto back = sample_source_from_string(to_string(s));
    REQUIRE(back.has_value());
    CHECK(*back == s);
  }
  CHECK(!sample_source_from_string("crowdsourced").has_value());
}

TEST_CASE("training sample validation") {
  CHECK_NOTHROW(sample("fine").validate());

  TrainingSample s = sample("x");
  s.behavior.clear();
  CHECK_THROWS_WITH(s.validate(), doctest::Contains("behavior must be non-empty"));

  s = sample("");
  CHECK_THROWS_WITH(s.validate(), doctest::Contains("target_query must be non-empty"));

  s = sample("x");
  s.behavior[0].item_id.clear();
  CHECK_THROWS_WITH(s.validate(), doctest::Contains("item_id must be non-empty"));

  s = sample("x");
  s.behavior[0].timestamp = -5;
  CHECK_THROWS_WITH(s.validate(), doctest::Contains("timestamp must be >= 0"));

  // Events at or after ref_time would leak the future into the input.
  s = sample("x");
  s.ref_time = s.behavior[0].timestamp;
  CHECK_THROWS_WITH(s.validate(), doctest::Contains("precede ref_time"));
}

TEST_CASE("behavior-driven samples pair purchases with the next search") {
  Sessions purchases;
  purchases["u1"] = {ev("p1", ActionType::click, 1000), ev("p2", ActionType::cart, 2000),
                     ev("p1", ActionType::purchase, 3000), ev("s1", ActionType::click, 4000),
                     ev("s1", ActionType::purchase, 5000)};
  purchases["u2"] = {ev("p9", ActionType::purchase, 1000)};  // user with no searches

  SearchLog searches;
  searches["u1"] = {{"u1", 3000, "same-instant"},  // not strictly after the purchase
                    {"u1", 3500, "usb charger"},
                    {"u1", 7000, "yoga mat"}};

  auto tight = build_behavior_driven(purchases, searches, 1000);
  REQUIRE(tight.size() == 1);
  CHECK(tight[0].target_query == "usb charger");
  CHECK(tight[0].ref_time == 3500);
  CHECK(tight[0].source == SampleSource::behavior_driven);
  REQUIRE(tight[0].behavior.size() == 3);  // history up to and including the purchase
  CHECK(tight[0].behavior.back().item_id == "p1");
  CHECK(tight[0].behavior.back().action == ActionType::purchase);

  // A wider window lets the second purchase reach the 7000ms search.
  auto wide = build_behavior_driven(purchases, searches, 2000);
  REQUIRE(wide.size() == 2);
  CHECK(wide[1].target_query == "yoga mat");
  CHECK(wide[1].behavior.size() == 5);

  // The cap keeps only the most recent events.
  auto capped = build_behavior_driven(purchases, searches, 1000, 2);
  REQUIRE(capped.size() == 1);
  REQUIRE(capped[0].behavior.size() == 2);
  CHECK(capped[0].behavior[0].item_id == "p2");
  CHECK(capped[0].behavior[1].item_id == "p1");

  CHECK(code_of([&] { build_behavior_driven(purchases, searches, 0); }) == Errc::config);
  CHECK(code_of([&] { build_behavior_driven(purchases, searches, 1000, 0); }) == Errc::config);
}

TEST_CASE("co-purchase matrix validation") {
  CoPurchaseMatrix m;
  m.rows["p1"] = {{"a", 0.2}, {"b", 0.9}};
  CHECK_THROWS_WITH(m.validate(), doctest::Contains("not sorted by descending weight"));

  m.rows["p1"] = {{"p1", 0.5}};
  CHECK_THROWS_WITH(m.validate(), doctest::Contains("pairs the item with itself"));

  m.rows["p1"] = {{"a", 0.0}};
  CHECK_THROWS_WITH(m.validate(), doctest::Contains("must be > 0"));

  m.rows["p1"] = {{"a", 0.9}, {"b", 0.9}, {"c", 0.1}};
  CHECK_NOTHROW(m.validate());
}

TEST_CASE("co-purchase samples target the tags of the top co-items") {
  CoPurchaseMatrix m;
  m.rows["p1"] = {{"s1", 0.9}, {"p2", 0.5}, {"b1", 0.1}};
  TagCatalog catalog({{"p1", "electronics"}, {"p2", "electronics"}, {"s1", "sports"}});

  std::vector<BehaviorEvent> seeds = {
      ev("p1", ActionType::purchase, 1000),  // has a row
      ev("p1", ActionType::click, 2000),     // not a purchase
      ev("q9", ActionType::purchase, 3000),  // no matrix row
  };

  auto two = build_co_purchase(m, catalog, seeds, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].target_query == "sports");
  CHECK(two[1].target_query == "electronics");
  for (const auto& s : two) {
    CHECK(s.source == SampleSource::co_purchase);
    REQUIRE(s.behavior.size() == 1);
    CHECK(s.behavior[0].item_id == "p1");
    CHECK(s.ref_time == 1001);
  }

  // top_k beyond the row length just takes the whole row; b1 is not in the
  // catalog so its sample targets the unknown tag.
  auto all = build_co_purchase(m, catalog, seeds, 10);
  REQUIRE(all.size() == 3);
  CHECK(all[2].target_query == TagCatalog::kUnknownTag);

  CHECK(code_of([&] { build_co_purchase(m, catalog, seeds, 0); }) == Errc::config);
}

TEST_CASE("rewrite augmentation flips the source and skips failures") {
  std::vector<TrainingSample> in = {sample("running shoes"), sample("laptop stand")};

  auto identity = augment_rewrite(in);
  REQUIRE(identity.size() == 2);
  CHECK(identity[0].target_query == "running shoes");
  CHECK(identity[0].source == SampleSource::llm_rewrite);
  CHECK(identity[0].behavior.size() == in[0].behavior.size());

  auto suffixed = augment_rewrite(in, [](const std::string& q) { return q + " deluxe"; });
  CHECK(suffixed[1].target_query == "laptop stand deluxe");

  auto dropping = augment_rewrite(in, [](const std::string& q) -> std::string {
    if (q == "running shoes") return "";
    return q;
  });
  REQUIRE(dropping.size() == 1);
  CHECK(dropping[0].target_query == "laptop stand");

  auto throwing = augment_rewrite(in, [](const std::string& q) -> std::string {
    if (q == "laptop stand") throw std::runtime_error("backend down");
    return q;
  });
  REQUIRE(throwing.size() == 1);
  CHECK(throwing[0].target_query == "running shoes");
}

TEST_CASE("human ingestion forces the source and names bad lines") {
  auto humans = ingest_human(kData + "/human_samples.jsonl");
  REQUIRE(humans.size() == 2);
  CHECK(humans[0].target_query == "wireless earbuds noise cancelling");
  for (const auto& h : humans) CHECK(h.source == SampleSource::human);

  CHECK_THROWS_WITH(ingest_human(kData + "/bad/human_bad.jsonl"),
                    doctest::Contains("human_bad.jsonl:2"));
}

TEST_CASE("mix config validation") {
  MixConfig cfg;
  cfg.total_size = 100;
  CHECK_NOTHROW(cfg.validate());

  cfg.ratio_human = 0.10;  // sum now 1.05
  CHECK_THROWS_WITH(cfg.validate(), doctest::Contains("expected 1"));

  cfg = MixConfig{};
  cfg.ratio_behavior_driven = -0.1;
  cfg.ratio_co_purchase = 0.9;
  CHECK_THROWS_WITH(cfg.validate(), doctest::Contains("must be >= 0"));
}

TEST_CASE("quota apportionment at the default ratios") {
  MixConfig cfg;
  auto hundred = apportion_quotas(cfg.ratios(), 100);
  CHECK(hundred == std::array<std::size_t, 4>{60, 20, 15, 5});

  // 10 * 0.15 and 10 * 0.05 both leave remainder 0.5; the earlier source wins
  // the single leftover unit.
  auto ten = apportion_quotas(cfg.ratios(), 10);
  CHECK(ten == std::array<std::size_t, 4>{6, 2, 2, 0});

  auto even = apportion_quotas({0.25, 0.25, 0.25, 0.25}, 2);
  CHECK(even == std::array<std::size_t, 4>{1, 1, 0, 0});

  CHECK(apportion_quotas(cfg.ratios(), 0) == std::array<std::size_t, 4>{0, 0, 0, 0});

  CHECK(code_of([] { apportion_quotas({0.5, 0.5, 0.5, 0.0}, 10); }) == Errc::config);
}

TEST_CASE("quotas always sum to the requested total") {
  SplitMix64 rng(20240819);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, 4> raw{};
    double sum = 0.0;
    for (auto& r : raw) {
      r = rng.next_double() + 1e-12;
      sum += r;
    }
    for (auto& r : raw) r /= sum;
    std::size_t total = rng.next_below(10000);
    auto q = apportion_quotas(raw, total);
    CHECK(q[0] + q[1] + q[2] + q[3] == total);
  }
}

TEST_CASE("mixing draws each quota without replacement in source order") {
  std::map<SampleSource, std::vector<TrainingSample>> pools;
  for (int i = 0; i < 30; ++i)
    pools[SampleSource::behavior_driven].push_back(sample("b" + std::to_string(i)));
  for (int i = 0; i < 10; ++i)
    pools[SampleSource::co_purchase].push_back(
        sample("c" + std::to_string(i), SampleSource::co_purchase));
  for (int i = 0; i < 10; ++i)
    pools[SampleSource::llm_rewrite].push_back(
        sample("r" + std::to_string(i), SampleSource::llm_rewrite));
  pools[SampleSource::human] = {sample("h0", SampleSource::human)};

  MixConfig cfg;
  cfg.total_size = 20;  // quotas 12 / 4 / 3 / 1

  auto corpus = mix(pools, cfg, 7);
  REQUIRE(corpus.size() == 20);

  std::map<SampleSource, std::size_t> counts;
  for (const auto& s : corpus) counts[s.source] += 1;
  CHECK(counts[SampleSource::behavior_driven] == 12);
  CHECK(counts[SampleSource::co_purchase] == 4);
  CHECK(counts[SampleSource::llm_rewrite] == 3);
  CHECK(counts[SampleSource::human] == 1);

  // Sources come out concatenated in declaration order.
  CHECK(corpus.front().source == SampleSource::behavior_driven);
  CHECK(corpus[12].source == SampleSource::co_purchase);
  CHECK(corpus.back().source == SampleSource::human);

  // Without replacement: every drawn target is distinct within its source.
  std::set<std::string> targets;
  for (const auto& s : corpus) CHECK(targets.insert(s.target_query).second);

  auto again = mix(pools, cfg, 7);
  REQUIRE(again.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i)
    CHECK(again[i].target_query == corpus[i].target_query);

  auto reseeded = mix(pools, cfg, 8);
  bool any_difference = false;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    any_difference = any_difference || reseeded[i].target_query != corpus[i].target_query;
  CHECK(any_difference);
}

TEST_CASE("mixing reports the source and shortfall when a pool runs dry") {
  std::map<SampleSource, std::vector<TrainingSample>> pools;
  for (int i = 0; i < 30; ++i)
    pools[SampleSource::behavior_driven].push_back(sample("b" + std::to_string(i)));
  for (int i = 0; i < 10; ++i)
    pools[SampleSource::co_purchase].push_back(
        sample("c" + std::to_string(i), SampleSource::co_purchase));
  for (int i = 0; i < 10; ++i)
    pools[SampleSource::llm_rewrite].push_back(
        sample("r" + std::to_string(i), SampleSource::llm_rewrite));
  // No human pool at all.

  MixConfig cfg;
  cfg.total_size = 20;
  CHECK_THROWS_WITH(mix(pools, cfg, 1),
                    doctest::Contains("source 'human' holds 0 sample(s) but the mix needs 1"));

  // A zero quota tolerates a missing pool.
  cfg.ratio_behavior_driven = 0.65;
  cfg.ratio_human = 0.0;
  auto corpus = mix(pools, cfg, 1);
  CHECK(corpus.size() == 20);
}

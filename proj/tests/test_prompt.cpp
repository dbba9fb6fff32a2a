#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <memory>

#include "intentgate/config.hpp"
#include "intentgate/prompt.hpp"
#include "intentgate/tokenizer.hpp"

#ifndef INTENTGATE_TEST_DATA_DIR
#define INTENTGATE_TEST_DATA_DIR "tests/data"
#endif

using namespace intentgate;

namespace {

const std::string kData = INTENTGATE_TEST_DATA_DIR;

BehaviorEvent ev(std::string item, ActionType a, int64_t ts) {
  return BehaviorEvent{std::move(item), a, ts};
}

TagCatalog catalog() {
  return TagCatalog({{"p1", "electronics"}, {"p2", "electronics"}, {"s1", "sports"}});
}

BehaviorWindow window_of(std::vector<BehaviorEvent> events) {
  BehaviorWindow w;
  w.events = std::move(events);
  return w;
}

PromptTemplate tmpl(std::string id, std::string body, std::vector<std::string> scenarios = {},
                    std::vector<double> affinity = {}) {
  PromptTemplate t;
  t.id = std::move(id);
  t.body = std::move(body);
  t.scenario_ids = std::move(scenarios);
  t.affinity = std::move(affinity);
  return t;
}

PromptComponent comp(std::string id, std::string text, std::vector<double> affinity = {}) {
  PromptComponent c;
  c.id = std::move(id);
  c.text = std::move(text);
  c.affinity = std::move(affinity);
  return c;
}

// Scores looked up by id, independent of features. Keeps selection and
// admission arithmetic exact in tests.
class TableScorer final : public ScorerModel {
 public:
  explicit TableScorer(std::map<std::string, double> scores) : scores_(std::move(scores)) {}

  double score_template(const PromptTemplate& t, const FeatureVector&) const override {
    auto it = scores_.find(t.id);
    return it == scores_.end() ? 0.0 : it->second;
  }

  double score_prompt(const PromptTemplate& t, const std::vector<const PromptComponent*>& cs,
                      const FeatureVector& x) const override {
    double s = score_template(t, x);
    for (const auto* c : cs) {
      auto it = scores_.find(c->id);
      if (it != scores_.end()) s += it->second;
    }
    return s;
  }

 private:
  std::map<std::string, double> scores_;
};

// Additive scores minus a fixed penalty per component pair, so a component's
// conditional gain shrinks as the prompt grows.
class InteractionScorer final : public ScorerModel {
 public:
  InteractionScorer(std::map<std::string, double> scores, double pair_penalty)
      : table_(std::move(scores)), pair_penalty_(pair_penalty) {}

  double score_template(const PromptTemplate& t, const FeatureVector& x) const override {
    return table_.score_template(t, x);
  }

  double score_prompt(const PromptTemplate& t, const std::vector<const PromptComponent*>& cs,
                      const FeatureVector& x) const override {
    double s = table_.score_prompt(t, cs, x);
    std::size_t n = cs.size();
    return s - pair_penalty_ * static_cast<double>(n * (n - 1) / 2);
  }

 private:
  TableScorer table_;
  double pair_penalty_;
};

constexpr const char* kMinimalBody = "B {timestamp} {behavior_sequence}";  // 9 tokens

PoolSet pools_of(std::vector<PromptTemplate> ts, std::vector<PromptComponent> cs = {}) {
  PoolSet p;
  p.templates = std::move(ts);
  p.components = std::move(cs);
  return p;
}

CostConfig zero_cost() {
  CostConfig c;
  c.latency_a = 0.0;
  c.latency_b = 0.0;
  c.memory_c = 0.0;
  c.memory_d = 0.0;
  c.slot_allowance_tokens = 0;
  return c;
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

TEST_CASE("feature basis layout and scenario one-hot") {
  BehaviorFeatures f;
  f.act_dist = {0.5, 0.25, 0.0, 0.25};
  f.recency = 0.9;
  f.diversity = 0.5;
  f.frequency = 0.125;

  std::vector<std::string> vocab = {"feed", "search"};
  auto x = feature_basis(f, ScenarioContext{"search", {}}, vocab);
  REQUIRE(x.size() == 9);
  CHECK(x[0] == doctest::Approx(0.5));
  CHECK(x[1] == doctest::Approx(0.25));
  CHECK(x[2] == doctest::Approx(0.0));
  CHECK(x[3] == doctest::Approx(0.25));
  CHECK(x[4] == doctest::Approx(0.9));
  CHECK(x[5] == doctest::Approx(0.5));
  CHECK(x[6] == doctest::Approx(0.125));
  CHECK(x[7] == doctest::Approx(0.0));  // feed
  CHECK(x[8] == doctest::Approx(1.0));  // search

  // Scenario outside the vocabulary leaves the one-hot block all zero.
  auto y = feature_basis(f, ScenarioContext{"checkout", {}}, vocab);
  CHECK(y[7] == doctest::Approx(0.0));
  CHECK(y[8] == doctest::Approx(0.0));
}

TEST_CASE("pool validation catches malformed entries") {
  auto finalize = [](PoolSet p) { p.validate_and_finalize(); };

  CHECK_THROWS_WITH(finalize(pools_of({tmpl("a", kMinimalBody), tmpl("a", kMinimalBody)})),
                    doctest::Contains("duplicate template id"));
  CHECK_THROWS_WITH(finalize(pools_of({tmpl("a", "no slots here")})),
                    doctest::Contains("{timestamp} exactly once"));
  CHECK_THROWS_WITH(
      finalize(pools_of({tmpl("a", "{timestamp} {behavior_sequence} {behavior_sequence}")})),
      doctest::Contains("{behavior_sequence} exactly once"));
  CHECK_THROWS_WITH(finalize(pools_of({tmpl("a", kMinimalBody, {""})})),
                    doctest::Contains("empty scenario id"));
  CHECK_THROWS_WITH(
      finalize(pools_of({tmpl("a", kMinimalBody)}, {comp("c", "hi"), comp("c", "bye")})),
      doctest::Contains("duplicate component id"));
  CHECK_THROWS_WITH(finalize(pools_of({tmpl("a", kMinimalBody)}, {comp("c", "")})),
                    doctest::Contains("empty text"));
  CHECK_THROWS_WITH(finalize(pools_of({tmpl("a", kMinimalBody)}, {comp("c", "fill {timestamp}")})),
                    doctest::Contains("must not contain slots"));

  // Affinity must fit within the derived basis (7 + one scenario here).
  PoolSet wide = pools_of({tmpl("a", kMinimalBody, {"feed"}, std::vector<double>(9, 0.1))});
  CHECK_THROWS_WITH(finalize(std::move(wide)), doctest::Contains("longer than the feature basis"));

  // Declared token costs are cross-checked against the tokenizer.
  PoolSet mismatch = pools_of({tmpl("a", kMinimalBody)}, {comp("c", "two words")});
  mismatch.components[0].token_cost = 5;
  CHECK_THROWS_WITH(finalize(std::move(mismatch)), doctest::Contains("declares token_cost"));

  // A zero cost is treated as "unset" and filled in.
  PoolSet fill = pools_of({tmpl("a", kMinimalBody)}, {comp("c", "two words")});
  fill.validate_and_finalize();
  CHECK(fill.components[0].token_cost == 2);
}

TEST_CASE("scenario vocabulary is sorted and deduplicated") {
  PoolSet p = pools_of({tmpl("a", kMinimalBody, {"search", "feed"}),
                        tmpl("b", kMinimalBody, {"feed", "ads"})});
  p.validate_and_finalize();
  CHECK(p.scenario_vocab == std::vector<std::string>{"ads", "feed", "search"});
  CHECK(p.basis_size() == 10);
}

TEST_CASE("template applicability") {
  auto universal = tmpl("u", kMinimalBody);
  CHECK(universal.applies_to("feed"));
  CHECK(universal.applies_to("anything"));

  auto scoped = tmpl("s", kMinimalBody, {"search"});
  CHECK(scoped.applies_to("search"));
  CHECK(!scoped.applies_to("feed"));

  PromptEngine engine(pools_of({universal, scoped}), std::make_shared<LinearScorer>());
  CHECK(engine.applicable_templates(ScenarioContext{"feed", {}}).size() == 1);
  CHECK(engine.applicable_templates(ScenarioContext{"search", {}}).size() == 2);

  BehaviorFeatures f;
  CHECK(code_of([&] { engine.score_template(scoped, f, ScenarioContext{"feed", {}}); }) ==
        Errc::not_applicable);
  CHECK(code_of([&] { engine.select_template({}, f, ScenarioContext{"feed", {}}); }) ==
        Errc::no_templates);
}

TEST_CASE("softmax selection at a pinned score pair") {
  auto scorer = std::make_shared<TableScorer>(std::map<std::string, double>{{"hi", 2.0}, {"lo", 0.0}});
  PromptEngine engine(pools_of({tmpl("hi", kMinimalBody), tmpl("lo", kMinimalBody)}), scorer);

  BehaviorFeatures f;
  ScenarioContext s{"feed", {}};
  auto pool = engine.applicable_templates(s);
  REQUIRE(pool.size() == 2);

  auto sel = engine.select_template(pool, f, s);
  CHECK(pool[sel.chosen_index]->id == "hi");
  REQUIRE(sel.probs.size() == 2);
  // exp(2)/(exp(2)+1) and its complement, frozen to full precision.
  std::size_t hi = pool[0]->id == "hi" ? 0 : 1;
  CHECK(sel.probs[hi] == doctest::Approx(0.8807970779778824).epsilon(1e-12));
  CHECK(sel.probs[1 - hi] == doctest::Approx(0.11920292202211755).epsilon(1e-12));
  CHECK(sel.probs[0] + sel.probs[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("temperature sharpens but never reorders the selection") {
  auto scorer = std::make_shared<TableScorer>(std::map<std::string, double>{{"hi", 2.0}, {"lo", 0.0}});
  PromptEngineConfig sharp;
  sharp.beta = 5.0;
  PromptEngine engine(pools_of({tmpl("hi", kMinimalBody), tmpl("lo", kMinimalBody)}), scorer, sharp);

  BehaviorFeatures f;
  ScenarioContext s{"feed", {}};
  auto pool = engine.applicable_templates(s);
  auto sel = engine.select_template(pool, f, s);
  CHECK(pool[sel.chosen_index]->id == "hi");
  std::size_t hi = pool[0]->id == "hi" ? 0 : 1;
  CHECK(sel.probs[hi] == doctest::Approx(std::exp(10.0) / (std::exp(10.0) + 1.0)).epsilon(1e-12));
}

TEST_CASE("exact score ties resolve to the smaller template id") {
  auto scorer = std::make_shared<TableScorer>(std::map<std::string, double>{{"tb", 1.0}, {"ta", 1.0}});
  // Pool order deliberately puts the larger id first.
  PromptEngine engine(pools_of({tmpl("tb", kMinimalBody), tmpl("ta", kMinimalBody)}), scorer);

  BehaviorFeatures f;
  ScenarioContext s{"feed", {}};
  auto pool = engine.applicable_templates(s);
  auto sel = engine.select_template(pool, f, s);
  CHECK(pool[sel.chosen_index]->id == "ta");
}

TEST_CASE("component admission ranks by gain and enforces a strict threshold") {
  auto scorer = std::make_shared<TableScorer>(
      std::map<std::string, double>{{"c-low", 0.5}, {"c-high", 1.0}, {"c-zero", 0.0}});
  PoolSet pools = pools_of({tmpl("t", kMinimalBody)},
                           {comp("c-low", "low note"), comp("c-high", "high note"),
                            comp("c-zero", "zero note")});
  PromptEngine engine(pools, scorer);

  BehaviorFeatures f;
  ScenarioContext s{"feed", {}};
  Prompt p;
  p.tmpl = engine.pools().templates[0];
  std::vector<const PromptComponent*> cands;
  for (const auto& c : engine.pools().components) cands.push_back(&c);

  Prompt grown = engine.adapt_structure(p, cands, f, s);
  REQUIRE(grown.accepted.size() == 2);
  CHECK(grown.accepted[0].id == "c-high");  // best gain admitted first
  CHECK(grown.accepted[1].id == "c-low");
  CHECK(!grown.has_component("c-zero"));  // gain 0 is not strictly above tau 0
}

TEST_CASE("admission re-evaluates gain against the growing prompt") {
  // c2 looks attractive standalone (0.8) but its conditional gain after c1 is
  // only 0.1 thanks to the pair penalty, which a tau of 0.5 rejects.
  auto scorer = std::make_shared<InteractionScorer>(
      std::map<std::string, double>{{"c1", 1.0}, {"c2", 0.8}}, 0.7);
  PromptEngineConfig cfg;
  cfg.tau_struct = 0.5;
  PoolSet pools = pools_of({tmpl("t", kMinimalBody)}, {comp("c1", "first note"), comp("c2", "second note")});
  PromptEngine engine(pools, scorer, cfg);

  BehaviorFeatures f;
  ScenarioContext s{"feed", {}};
  Prompt p;
  p.tmpl = engine.pools().templates[0];
  std::vector<const PromptComponent*> cands;
  for (const auto& c : engine.pools().components) cands.push_back(&c);

  Prompt grown = engine.adapt_structure(p, cands, f, s);
  REQUIRE(grown.accepted.size() == 1);
  CHECK(grown.accepted[0].id == "c1");
}

TEST_CASE("a gain exactly at tau is rejected") {
  auto scorer = std::make_shared<TableScorer>(std::map<std::string, double>{{"c", 0.5}});
  PromptEngineConfig cfg;
  cfg.tau_struct = 0.5;
  PromptEngine engine(pools_of({tmpl("t", kMinimalBody)}, {comp("c", "a note")}), scorer, cfg);

  BehaviorFeatures f;
  ScenarioContext s{"feed", {}};
  Prompt p;
  p.tmpl = engine.pools().templates[0];
  const auto& c = engine.pools().components[0];
  Prompt grown = engine.adapt_structure(p, {&c}, f, s);
  CHECK(grown.accepted.empty());
}

TEST_CASE("admission skips candidates the budget cannot absorb") {
  auto scorer = std::make_shared<TableScorer>(
      std::map<std::string, double>{{"c-big", 2.0}, {"c-small", 1.0}});
  BudgetLimits budget;
  budget.max_tokens = 15;  // template is 9 tokens, so 6 left for components
  PoolSet pools = pools_of(
      {tmpl("t", kMinimalBody)},
      {comp("c-big", "alpha beta gamma delta epsilon zeta eta theta iota kappa"),  // 10 tokens
       comp("c-small", "one two three four five")});                               // 5 tokens
  PromptEngine engine(pools, scorer, {}, budget, zero_cost());

  BehaviorFeatures f;
  ScenarioContext s{"feed", {}};
  Prompt p;
  p.tmpl = engine.pools().templates[0];
  std::vector<const PromptComponent*> cands;
  for (const auto& c : engine.pools().components) cands.push_back(&c);

  // c-big is ranked first but overflows; c-small still gets its chance.
  Prompt grown = engine.adapt_structure(p, cands, f, s);
  REQUIRE(grown.accepted.size() == 1);
  CHECK(grown.accepted[0].id == "c-small");
}

TEST_CASE("marginal utility rejects a component already in the prompt") {
  auto scorer = std::make_shared<TableScorer>(std::map<std::string, double>{{"c", 1.0}});
  PromptEngine engine(pools_of({tmpl("t", kMinimalBody)}, {comp("c", "a note")}), scorer);

  BehaviorFeatures f;
  ScenarioContext s{"feed", {}};
  Prompt p;
  p.tmpl = engine.pools().templates[0];
  p.accepted.push_back(engine.pools().components[0]);
  CHECK(code_of([&] { engine.marginal_utility(p, engine.pools().components[0], f, s); }) ==
        Errc::duplicate_component);
}

TEST_CASE("budget enforcement evicts the cheapest loss, larger id on ties") {
  auto scorer = std::make_shared<TableScorer>(
      std::map<std::string, double>{{"c-a", 0.9}, {"c-b", 0.1}, {"c-z", 0.1}});
  BudgetLimits budget;
  budget.max_tokens = 14;  // template 9 + one 5-token component
  PoolSet pools = pools_of({tmpl("t", kMinimalBody)},
                           {comp("c-a", "one two three four five"),
                            comp("c-b", "six seven eight nine ten"),
                            comp("c-z", "red green blue cyan pink")});
  PromptEngine engine(pools, scorer, {}, budget, zero_cost());

  BehaviorFeatures f;
  ScenarioContext s{"feed", {}};
  Prompt p;
  p.tmpl = engine.pools().templates[0];
  for (const auto& c : engine.pools().components) p.accepted.push_back(c);

  // c-b and c-z tie on removal loss; the larger id goes first, then c-b.
  Prompt fitted = engine.enforce_budget(p, f, s);
  REQUIRE(fitted.accepted.size() == 1);
  CHECK(fitted.accepted[0].id == "c-a");
  CHECK(engine.estimate_cost(fitted).within(engine.budget()));
}

TEST_CASE("a template that alone busts the budget is a hard error") {
  auto scorer = std::make_shared<LinearScorer>();
  BudgetLimits budget;
  budget.max_tokens = 5;  // below the 9-token template
  PromptEngine engine(pools_of({tmpl("t", kMinimalBody)}), scorer, {}, budget, zero_cost());

  BehaviorFeatures f;
  ScenarioContext s{"feed", {}};
  Prompt p;
  p.tmpl = engine.pools().templates[0];
  CHECK(code_of([&] { engine.enforce_budget(p, f, s); }) == Errc::template_over_budget);
}

TEST_CASE("cost estimate is affine in the token count") {
  PromptEngine engine(pools_of({tmpl("t", kMinimalBody)}, {comp("c", "one two three")}),
                      std::make_shared<LinearScorer>());

  Prompt bare;
  bare.tmpl = engine.pools().templates[0];
  auto e0 = engine.estimate_cost(bare);
  std::size_t base = token_count(bare.tmpl.body) + engine.cost().slot_allowance_tokens;
  CHECK(e0.tokens == base);
  CHECK(e0.latency_ms == doctest::Approx(2.0 * static_cast<double>(base) + 100.0));
  CHECK(e0.memory_kb == doctest::Approx(4.0 * static_cast<double>(base) + 1024.0));

  Prompt with = bare;
  with.accepted.push_back(engine.pools().components[0]);
  auto e1 = engine.estimate_cost(with);
  CHECK(e1.tokens == base + 3);
  CHECK(e1.latency_ms == doctest::Approx(e0.latency_ms + 2.0 * 3.0));
  CHECK(e1.memory_kb == doctest::Approx(e0.memory_kb + 4.0 * 3.0));
}

TEST_CASE("instantiation fills both slots and appends components on new lines") {
  PromptEngine engine(pools_of({tmpl("t", "T {timestamp} | {behavior_sequence} E")},
                               {comp("c1", "Note one.")}),
                      std::make_shared<LinearScorer>(), {}, {}, zero_cost());

  Prompt p;
  p.tmpl = engine.pools().templates[0];
  p.accepted.push_back(engine.pools().components[0]);

  auto w = window_of({ev("p1", ActionType::click, 0)});
  std::string text = engine.instantiate(p, w, 0);
  CHECK(text ==
        "T 1970-01-01T00:00:00.000Z | (p1, click, 1970-01-01T00:00:00.000Z) E\nNote one.");
}

TEST_CASE("instantiation drops oldest events until the text fits") {
  auto w = window_of({ev("p1", ActionType::click, 0), ev("p2", ActionType::cart, 1000),
                      ev("s1", ActionType::purchase, 2000)});
  int64_t now = 2000;

  // The template renders to "<iso-now> <sequence>"; size the budget to admit
  // exactly the two newest events.
  std::string two_newest =
      iso8601_ms(now) + " " + render_behavior_sequence({w.events[1], w.events[2]});
  BudgetLimits budget;
  budget.max_tokens = token_count(two_newest);

  PromptEngine engine(pools_of({tmpl("t", "{timestamp} {behavior_sequence}")}),
                      std::make_shared<LinearScorer>(), {}, budget, zero_cost());
  Prompt p;
  p.tmpl = engine.pools().templates[0];

  CHECK(engine.instantiate(p, w, now) == two_newest);
}

TEST_CASE("instantiation fails when even a single event overflows") {
  auto w = window_of({ev("p1", ActionType::click, 0)});
  std::string one = iso8601_ms(0) + " " + render_behavior_sequence(w.events);
  BudgetLimits budget;
  budget.max_tokens = token_count(one) - 1;

  PromptEngine engine(pools_of({tmpl("t", "{timestamp} {behavior_sequence}")}),
                      std::make_shared<LinearScorer>(), {}, budget, zero_cost());
  Prompt p;
  p.tmpl = engine.pools().templates[0];
  CHECK(code_of([&] { engine.instantiate(p, w, 0); }) == Errc::prompt_over_budget);
  CHECK(code_of([&] { engine.instantiate(p, BehaviorWindow{}, 0); }) == Errc::empty_window);
}

TEST_CASE("the latency axis can be the binding token cap") {
  auto w = window_of({ev("p1", ActionType::click, 0), ev("p2", ActionType::cart, 1000)});
  int64_t now = 1000;
  std::string newest_only = iso8601_ms(now) + " " + render_behavior_sequence({w.events[1]});

  CostConfig cost = zero_cost();
  cost.latency_a = 2.0;
  cost.latency_b = 100.0;
  BudgetLimits budget;  // max_tokens stays at the 2048 default
  budget.max_latency_ms = 100.0 + 2.0 * static_cast<double>(token_count(newest_only));

  PromptEngine engine(pools_of({tmpl("t", "{timestamp} {behavior_sequence}")}),
                      std::make_shared<LinearScorer>(), {}, budget, cost);
  Prompt p;
  p.tmpl = engine.pools().templates[0];
  CHECK(engine.instantiate(p, w, now) == newest_only);

  // A ceiling below the fixed latency cost leaves no token budget at all.
  BudgetLimits hopeless = budget;
  hopeless.max_latency_ms = 90.0;
  PromptEngine strangled(pools_of({tmpl("t", "{timestamp} {behavior_sequence}")}),
                         std::make_shared<LinearScorer>(), {}, hopeless, cost);
  CHECK(code_of([&] { strangled.instantiate(p, w, now); }) == Errc::prompt_over_budget);
}

TEST_CASE("end-to-end build with the built-in pool") {
  PromptEngine engine(default_pools(), std::make_shared<LinearScorer>());
  auto w = window_of({ev("p1", ActionType::click, 1710000000000 - 5000),
                      ev("s1", ActionType::purchase, 1710000000000 - 1000)});

  BuiltPrompt built = engine.build(w, catalog(), ScenarioContext{"feed", {}}, 1710000000000);
  CHECK(built.text.find("Given a timestamp 2024-03-09T16:00:00.000Z") == 0);
  CHECK(built.text.find("(p1, click, ") != std::string::npos);
  CHECK(built.text.find("(s1, purchase, ") != std::string::npos);
  CHECK(built.text.find("{timestamp}") == std::string::npos);
  CHECK(built.text.find("{behavior_sequence}") == std::string::npos);

  CHECK(built.prompt.accepted.empty());
  REQUIRE(built.prompt.instantiated.has_value());
  CHECK(*built.prompt.instantiated == built.text);
  CHECK(built.estimate.tokens ==
        token_count(engine.pools().templates[0].body) + engine.cost().slot_allowance_tokens);
  CHECK(built.features.act_dist[0] == doctest::Approx(0.5));

  CHECK(engine.build_prompt(w, catalog(), ScenarioContext{"feed", {}}, 1710000000000) ==
        built.text);
}

TEST_CASE("build is deterministic") {
  auto pools = load_pools(kData + "/template_pool.json", kData + "/component_pool.json");
  PromptEngine engine(pools, std::make_shared<LinearScorer>());
  auto w = window_of({ev("p1", ActionType::click, 1000), ev("s1", ActionType::cart, 2000),
                      ev("p2", ActionType::purchase, 3000)});
  ScenarioContext s{"search", {}};

  std::string a = engine.build_prompt(w, catalog(), s, 3000);
  std::string b = engine.build_prompt(w, catalog(), s, 3000);
  CHECK(a == b);
}

TEST_CASE("pool files load with derived vocabulary and token costs") {
  auto pools = load_pools(kData + "/template_pool.json", kData + "/component_pool.json");
  REQUIRE(pools.templates.size() == 2);
  REQUIRE(pools.components.size() == 3);
  CHECK(pools.scenario_vocab == std::vector<std::string>{"search"});
  CHECK(pools.basis_size() == 8);
  for (const auto& c : pools.components) CHECK(c.token_cost == token_count(c.text));

  // Omitting the template path falls back to the built-in template while
  // still loading components from disk.
  auto mixed = load_pools("", kData + "/component_pool.json");
  REQUIRE(mixed.templates.size() == 1);
  CHECK(mixed.templates[0].id == "next-query-default");
  CHECK(mixed.components.size() == 3);

  auto bare = load_pools(kData + "/template_pool.json", "");
  CHECK(bare.components.empty());
}

TEST_CASE("engine and budget configs validate their ranges") {
  PromptEngineConfig bad;
  bad.beta = 0.0;
  CHECK_THROWS_WITH(bad.validate(), doctest::Contains("prompt.beta"));

  BudgetLimits b;
  b.max_tokens = 0;
  CHECK_THROWS_WITH(b.validate(), doctest::Contains("budget.max_tokens"));
  b = BudgetLimits{};
  b.max_latency_ms = 0.0;
  CHECK_THROWS_WITH(b.validate(), doctest::Contains("budget.max_latency_ms"));

  CostConfig c;
  c.latency_a = -1.0;
  CHECK_THROWS_WITH(c.validate(), doctest::Contains("cost.latency_*"));

  Config cfg;
  cfg.set("prompt.beta", 2.5);
  cfg.set("prompt.tau_struct", 0.25);
  cfg.set("budget.max_tokens", static_cast<int64_t>(512));
  cfg.set("cost.latency_a", 1.5);
  auto pc = PromptEngineConfig::from_config(cfg);
  CHECK(pc.beta == doctest::Approx(2.5));
  CHECK(pc.tau_struct == doctest::Approx(0.25));
  CHECK(BudgetLimits::from_config(cfg).max_tokens == 512);
  CHECK(CostConfig::from_config(cfg).latency_a == doctest::Approx(1.5));
}

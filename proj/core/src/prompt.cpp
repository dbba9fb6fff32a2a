#include "intentgate/prompt.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "intentgate/config.hpp"
#include "intentgate/tokenizer.hpp"

namespace intentgate {

namespace {

constexpr const char* kTimestampSlot = "{timestamp}";
constexpr const char* kSequenceSlot = "{behavior_sequence}";

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t count = 0, pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

void replace_once(std::string& text, const std::string& slot, const std::string& value) {
  std::size_t pos = text.find(slot);
  if (pos == std::string::npos) return;
  text.replace(pos, slot.size(), value);
}

double dot_affinity(const std::vector<double>& w, const FeatureVector& x) {
  double s = 0.0;
  std::size_t n = std::min(w.size(), x.size());
  for (std::size_t i = 0; i < n; ++i) s += w[i] * x[i];
  return s;
}

}  // namespace

bool PromptTemplate::applies_to(const std::string& scenario_id) const {
  if (scenario_ids.empty()) return true;
  return std::find(scenario_ids.begin(), scenario_ids.end(), scenario_id) != scenario_ids.end();
}

void BudgetLimits::validate() const {
  if (max_tokens == 0) fail(Errc::config, "budget.max_tokens must be > 0");
  if (!(max_latency_ms > 0.0)) fail(Errc::config, "budget.max_latency_ms must be > 0");
  if (!(max_memory_kb > 0.0)) fail(Errc::config, "budget.max_memory_kb must be > 0");
}

BudgetLimits BudgetLimits::from_config(const Config& cfg) {
  BudgetLimits b;
  b.max_tokens = static_cast<std::size_t>(
      cfg.get_int("budget.max_tokens", static_cast<int64_t>(b.max_tokens)));
  b.max_latency_ms = cfg.get_double("budget.max_latency_ms", b.max_latency_ms);
  b.max_memory_kb = cfg.get_double("budget.max_memory_kb", b.max_memory_kb);
  b.validate();
  return b;
}

void CostConfig::validate() const {
  if (latency_a < 0.0 || latency_b < 0.0) fail(Errc::config, "cost.latency_* must be >= 0");
  if (memory_c < 0.0 || memory_d < 0.0) fail(Errc::config, "cost.memory_* must be >= 0");
}

CostConfig CostConfig::from_config(const Config& cfg) {
  CostConfig c;
  c.latency_a = cfg.get_double("cost.latency_a", c.latency_a);
  c.latency_b = cfg.get_double("cost.latency_b", c.latency_b);
  c.memory_c = cfg.get_double("cost.memory_c", c.memory_c);
  c.memory_d = cfg.get_double("cost.memory_d", c.memory_d);
  c.slot_allowance_tokens = static_cast<std::size_t>(cfg.get_int(
      "prompt.slot_allowance_tokens", static_cast<int64_t>(c.slot_allowance_tokens)));
  c.validate();
  return c;
}

bool CostEstimate::within(const BudgetLimits& budget) const {
  return tokens <= budget.max_tokens && latency_ms <= budget.max_latency_ms &&
         memory_kb <= budget.max_memory_kb;
}

bool Prompt::has_component(const std::string& id) const {
  for (const auto& c : accepted)
    if (c.id == id) return true;
  return false;
}

FeatureVector feature_basis(const BehaviorFeatures& f, const ScenarioContext& s,
                            const std::vector<std::string>& scenario_vocab) {
  FeatureVector x(kBehaviorBasisSize + scenario_vocab.size(), 0.0);
  for (std::size_t i = 0; i < f.act_dist.size(); ++i) x[i] = f.act_dist[i];
  x[4] = f.recency;
  x[5] = f.diversity;
  x[6] = f.frequency;
  auto it = std::lower_bound(scenario_vocab.begin(), scenario_vocab.end(), s.scenario_id);
  if (it != scenario_vocab.end() && *it == s.scenario_id)
    x[kBehaviorBasisSize + static_cast<std::size_t>(it - scenario_vocab.begin())] = 1.0;
  return x;
}

void PoolSet::validate_and_finalize() {
  std::set<std::string> scenario_set;
  std::set<std::string> ids;
  for (const auto& t : templates) {
    if (t.id.empty()) fail(Errc::config, "template id must be non-empty");
    if (!ids.insert(t.id).second) fail(Errc::config, "duplicate template id '" + t.id + "'");
    if (count_occurrences(t.body, kTimestampSlot) != 1)
      fail(Errc::config, "template '" + t.id + "' must contain {timestamp} exactly once");
    if (count_occurrences(t.body, kSequenceSlot) != 1)
      fail(Errc::config, "template '" + t.id + "' must contain {behavior_sequence} exactly once");
    for (const auto& s : t.scenario_ids) {
      if (s.empty()) fail(Errc::config, "template '" + t.id + "' lists an empty scenario id");
      scenario_set.insert(s);
    }
  }
  scenario_vocab.assign(scenario_set.begin(), scenario_set.end());

  ids.clear();
  for (auto& c : components) {
    if (c.id.empty()) fail(Errc::config, "component id must be non-empty");
    if (!ids.insert(c.id).second) fail(Errc::config, "duplicate component id '" + c.id + "'");
    if (c.text.empty()) fail(Errc::config, "component '" + c.id + "' has empty text");
    if (c.text.find(kTimestampSlot) != std::string::npos ||
        c.text.find(kSequenceSlot) != std::string::npos)
      fail(Errc::config, "component '" + c.id + "' must not contain slots");
    std::size_t actual = token_count(c.text);
    if (c.token_cost == 0)
      c.token_cost = actual;
    else if (c.token_cost != actual)
      fail(Errc::config, "component '" + c.id + "' declares token_cost " +
                             std::to_string(c.token_cost) + " but tokenizes to " +
                             std::to_string(actual));
  }

  std::size_t basis = basis_size();
  for (const auto& t : templates)
    if (t.affinity.size() > basis)
      fail(Errc::config, "template '" + t.id + "' affinity is longer than the feature basis");
  for (const auto& c : components)
    if (c.affinity.size() > basis)
      fail(Errc::config, "component '" + c.id + "' affinity is longer than the feature basis");
}

double LinearScorer::score_template(const PromptTemplate& t, const FeatureVector& x) const {
  return dot_affinity(t.affinity, x);
}

double LinearScorer::score_prompt(const PromptTemplate& t,
                                  const std::vector<const PromptComponent*>& components,
                                  const FeatureVector& x) const {
  double s = dot_affinity(t.affinity, x);
  for (const auto* c : components) s += dot_affinity(c->affinity, x);
  return s;
}

void PromptEngineConfig::validate() const {
  if (!(beta > 0.0)) fail(Errc::config, "prompt.beta must be > 0");
}

PromptEngineConfig PromptEngineConfig::from_config(const Config& cfg) {
  PromptEngineConfig p;
  p.beta = cfg.get_double("prompt.beta", p.beta);
  p.tau_struct = cfg.get_double("prompt.tau_struct", p.tau_struct);
  p.validate();
  return p;
}

PromptEngine::PromptEngine(PoolSet pools, std::shared_ptr<const ScorerModel> scorer,
                           PromptEngineConfig cfg, BudgetLimits budget, CostConfig cost,
                           FeatureConfig feature_cfg)
    : pools_(std::move(pools)),
      scorer_(std::move(scorer)),
      cfg_(cfg),
      budget_(budget),
      cost_(cost),
      feature_cfg_(feature_cfg) {
  if (!scorer_) fail(Errc::config, "prompt engine requires a scorer");
  pools_.validate_and_finalize();
  cfg_.validate();
  budget_.validate();
  cost_.validate();
  feature_cfg_.validate();
}

std::vector<const PromptTemplate*> PromptEngine::applicable_templates(
    const ScenarioContext& s) const {
  std::vector<const PromptTemplate*> out;
  for (const auto& t : pools_.templates)
    if (t.applies_to(s.scenario_id)) out.push_back(&t);
  return out;
}

double PromptEngine::score_template(const PromptTemplate& t, const BehaviorFeatures& f,
                                    const ScenarioContext& s) const {
  if (!t.applies_to(s.scenario_id))
    fail(Errc::not_applicable,
         "template '" + t.id + "' does not serve scenario '" + s.scenario_id + "'");
  return scorer_->score_template(t, feature_basis(f, s, pools_.scenario_vocab));
}

TemplateSelection PromptEngine::select_template(const std::vector<const PromptTemplate*>& pool,
                                                const BehaviorFeatures& f,
                                                const ScenarioContext& s) const {
  if (pool.empty())
    fail(Errc::no_templates, "no templates applicable to scenario '" + s.scenario_id + "'");
  FeatureVector x = feature_basis(f, s, pools_.scenario_vocab);

  std::vector<double> alpha(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!pool[i]->applies_to(s.scenario_id))
      fail(Errc::not_applicable,
           "template '" + pool[i]->id + "' does not serve scenario '" + s.scenario_id + "'");
    alpha[i] = scorer_->score_template(*pool[i], x);
  }

  // Numerically stable softmax over beta * alpha.
  double m = cfg_.beta * alpha[0];
  for (std::size_t i = 1; i < alpha.size(); ++i) m = std::max(m, cfg_.beta * alpha[i]);
  TemplateSelection sel;
  sel.probs.resize(pool.size());
  double z = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    sel.probs[i] = std::exp(cfg_.beta * alpha[i] - m);
    z += sel.probs[i];
  }
  for (auto& p : sel.probs) p /= z;

  // argmax alpha (equivalently argmax prob); exact ties favor the smaller id.
  std::size_t best = 0;
  for (std::size_t i = 1; i < pool.size(); ++i) {
    if (alpha[i] > alpha[best] || (alpha[i] == alpha[best] && pool[i]->id < pool[best]->id))
      best = i;
  }
  sel.chosen_index = best;
  return sel;
}

double PromptEngine::prompt_utility(const Prompt& p, const BehaviorFeatures& f,
                                    const ScenarioContext& s) const {
  FeatureVector x = feature_basis(f, s, pools_.scenario_vocab);
  std::vector<const PromptComponent*> comps;
  comps.reserve(p.accepted.size());
  for (const auto& c : p.accepted) comps.push_back(&c);
  return scorer_->score_prompt(p.tmpl, comps, x);
}

double PromptEngine::marginal_utility(const Prompt& p, const PromptComponent& c,
                                      const BehaviorFeatures& f, const ScenarioContext& s) const {
  if (p.has_component(c.id))
    fail(Errc::duplicate_component, "component '" + c.id + "' is already in the prompt");
  FeatureVector x = feature_basis(f, s, pools_.scenario_vocab);
  std::vector<const PromptComponent*> comps;
  comps.reserve(p.accepted.size() + 1);
  for (const auto& a : p.accepted) comps.push_back(&a);
  double without = scorer_->score_prompt(p.tmpl, comps, x);
  comps.push_back(&c);
  double with = scorer_->score_prompt(p.tmpl, comps, x);
  return with - without;
}

Prompt PromptEngine::adapt_structure(Prompt p, const std::vector<const PromptComponent*>& candidates,
                                     const BehaviorFeatures& f, const ScenarioContext& s) const {
  // Rank once by standalone gain against the incoming prompt, then admit
  // greedily, re-evaluating each gain against the growing prompt.
  struct Ranked {
    const PromptComponent* c;
    double standalone;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(candidates.size());
  for (const auto* c : candidates) {
    if (c == nullptr || p.has_component(c->id)) continue;
    ranked.push_back({c, marginal_utility(p, *c, f, s)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.standalone != b.standalone) return a.standalone > b.standalone;
    return a.c->id < b.c->id;
  });

  for (const auto& r : ranked) {
    if (p.has_component(r.c->id)) continue;
    double delta = marginal_utility(p, *r.c, f, s);
    if (!(delta > cfg_.tau_struct)) continue;
    Prompt trial = p;
    trial.accepted.push_back(*r.c);
    if (estimate_cost(trial).within(budget_)) p = std::move(trial);
  }
  return p;
}

Prompt PromptEngine::enforce_budget(Prompt p, const BehaviorFeatures& f,
                                    const ScenarioContext& s) const {
  if (estimate_cost(p).within(budget_)) return p;
  FeatureVector x = feature_basis(f, s, pools_.scenario_vocab);

  while (!estimate_cost(p).within(budget_)) {
    if (p.accepted.empty())
      fail(Errc::template_over_budget,
           "template '" + p.tmpl.id + "' exceeds the budget with no components left to drop");

    std::vector<const PromptComponent*> all;
    all.reserve(p.accepted.size());
    for (const auto& c : p.accepted) all.push_back(&c);
    double full = scorer_->score_prompt(p.tmpl, all, x);

    // Drop the component whose removal costs the least utility; ties evict
    // the lexicographically larger id, mirroring the admission preference.
    std::size_t victim = 0;
    double victim_loss = 0.0;
    for (std::size_t i = 0; i < p.accepted.size(); ++i) {
      std::vector<const PromptComponent*> rest;
      rest.reserve(p.accepted.size() - 1);
      for (std::size_t j = 0; j < p.accepted.size(); ++j)
        if (j != i) rest.push_back(&p.accepted[j]);
      double loss = full - scorer_->score_prompt(p.tmpl, rest, x);
      if (i == 0 || loss < victim_loss ||
          (loss == victim_loss && p.accepted[i].id > p.accepted[victim].id)) {
        victim = i;
        victim_loss = loss;
      }
    }
    p.accepted.erase(p.accepted.begin() + static_cast<std::ptrdiff_t>(victim));
  }
  return p;
}

CostEstimate PromptEngine::estimate_cost(const Prompt& p) const {
  std::size_t tokens = token_count(p.tmpl.body) + cost_.slot_allowance_tokens;
  for (const auto& c : p.accepted) tokens += c.token_cost;
  CostEstimate e;
  e.tokens = tokens;
  e.latency_ms = cost_.latency_a * static_cast<double>(tokens) + cost_.latency_b;
  e.memory_kb = cost_.memory_c * static_cast<double>(tokens) + cost_.memory_d;
  return e;
}

std::size_t PromptEngine::token_cap() const {
  double cap = static_cast<double>(budget_.max_tokens);
  if (cost_.latency_a > 0.0)
    cap = std::min(cap, std::floor((budget_.max_latency_ms - cost_.latency_b) / cost_.latency_a));
  if (cost_.memory_c > 0.0)
    cap = std::min(cap, std::floor((budget_.max_memory_kb - cost_.memory_d) / cost_.memory_c));
  return cap < 0.0 ? 0 : static_cast<std::size_t>(cap);
}

std::string PromptEngine::instantiate(const Prompt& p, const BehaviorWindow& window,
                                      int64_t now) const {
  if (window.empty()) fail(Errc::empty_window, "cannot instantiate a prompt from an empty window");

  const std::size_t cap = token_cap();
  std::vector<BehaviorEvent> events = window.events;
  for (;;) {
    std::string text = p.tmpl.body;
    replace_once(text, kTimestampSlot, iso8601_ms(now));
    replace_once(text, kSequenceSlot, render_behavior_sequence(events));
    for (const auto& c : p.accepted) {
      text += '\n';
      text += c.text;
    }
    if (token_count(text) <= cap) return text;
    if (events.size() <= 1)
      fail(Errc::prompt_over_budget,
           "prompt for template '" + p.tmpl.id + "' exceeds the budget even with one event");
    events.erase(events.begin());  // oldest goes first
  }
}

BuiltPrompt PromptEngine::build(const BehaviorWindow& window, const TagCatalog& catalog,
                                const ScenarioContext& s, int64_t now) const {
  BehaviorFeatures f = extract_features(window, catalog, now, feature_cfg_);
  auto applicable = applicable_templates(s);
  TemplateSelection sel = select_template(applicable, f, s);

  Prompt p;
  p.tmpl = *applicable[sel.chosen_index];
  std::vector<const PromptComponent*> candidates;
  candidates.reserve(pools_.components.size());
  for (const auto& c : pools_.components) candidates.push_back(&c);
  p = adapt_structure(std::move(p), candidates, f, s);
  p = enforce_budget(std::move(p), f, s);

  BuiltPrompt out;
  out.text = instantiate(p, window, now);
  out.estimate = estimate_cost(p);
  p.instantiated = out.text;
  out.prompt = std::move(p);
  out.features = f;
  return out;
}

std::string PromptEngine::build_prompt(const BehaviorWindow& window, const TagCatalog& catalog,
                                       const ScenarioContext& s, int64_t now) const {
  return build(window, catalog, s, now).text;
}

PoolSet default_pools() {
  PoolSet pools;
  PromptTemplate t;
  t.id = "next-query-default";
  t.body =
      "Given a timestamp {timestamp} and a user behavior sequence {behavior_sequence}, "
      "infer the user's next search intent and generate the most likely search query.\n"
      "Output: <predicted search query>";
  pools.templates.push_back(std::move(t));
  pools.validate_and_finalize();
  return pools;
}

}  // namespace intentgate

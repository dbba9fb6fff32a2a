#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "intentgate/behavior.hpp"
#include "intentgate/features.hpp"

namespace intentgate {

class Config;

struct ScenarioContext {
  std::string scenario_id;
  std::map<std::string, std::string> attributes;  // opaque, carried along
};

struct PromptTemplate {
  std::string id;
  std::vector<std::string> scenario_ids;  // empty = applicable everywhere
  std::string body;  // contains {timestamp} and {behavior_sequence} exactly once
  std::vector<double> affinity;

  bool applies_to(const std::string& scenario_id) const;
};

struct PromptComponent {
  std::string id;
  std::string text;  // no slots
  std::vector<double> affinity;
  std::size_t token_cost = 0;  // always equals token_count(text)
};

struct BudgetLimits {
  std::size_t max_tokens = 2048;
  double max_latency_ms = 2000.0;
  double max_memory_kb = 65536.0;

  void validate() const;  // all strictly positive
  static BudgetLimits from_config(const Config& cfg);
};

// Affine cost model: latency and memory are linear in the token count.
struct CostConfig {
  double latency_a = 2.0;
  double latency_b = 100.0;
  double memory_c = 4.0;
  double memory_d = 1024.0;
  std::size_t slot_allowance_tokens = 256;  // reserved for slot fill at estimate time

  void validate() const;
  static CostConfig from_config(const Config& cfg);
};

struct CostEstimate {
  std::size_t tokens = 0;
  double latency_ms = 0.0;
  double memory_kb = 0.0;

  bool within(const BudgetLimits& budget) const;
};

struct Prompt {
  PromptTemplate tmpl;
  std::vector<PromptComponent> accepted;  // distinct, in acceptance order
  std::optional<std::string> instantiated;

  bool has_component(const std::string& id) const;
};

// Scoring basis: [act_dist(4), recency, diversity, frequency] followed by a
// one-hot over the pool's scenario vocabulary.
using FeatureVector = std::vector<double>;
inline constexpr std::size_t kBehaviorBasisSize = 7;

FeatureVector feature_basis(const BehaviorFeatures& f, const ScenarioContext& s,
                            const std::vector<std::string>& scenario_vocab);

struct PoolSet {
  std::vector<PromptTemplate> templates;
  std::vector<PromptComponent> components;
  std::vector<std::string> scenario_vocab;  // sorted, distinct; derived from templates

  std::size_t basis_size() const { return kBehaviorBasisSize + scenario_vocab.size(); }

  // Derives the scenario vocabulary, checks ids are unique, slots appear
  // exactly once, affinity vectors fit the basis, and component token costs
  // match the tokenizer (filling them in when absent, i.e. zero).
  void validate_and_finalize();
};

// Swappable utility model. Scores drive both template selection and the
// component admission/eviction decisions.
class ScorerModel {
 public:
  virtual ~ScorerModel() = default;
  virtual double score_template(const PromptTemplate& t, const FeatureVector& x) const = 0;
  virtual double score_prompt(const PromptTemplate& t,
                              const std::vector<const PromptComponent*>& components,
                              const FeatureVector& x) const = 0;
};

// Default: dot(affinity, x), summed over the template and every component.
class LinearScorer final : public ScorerModel {
 public:
  double score_template(const PromptTemplate& t, const FeatureVector& x) const override;
  double score_prompt(const PromptTemplate& t,
                      const std::vector<const PromptComponent*>& components,
                      const FeatureVector& x) const override;
};

struct PromptEngineConfig {
  double beta = 1.0;        // softmax temperature, > 0
  double tau_struct = 0.0;  // component admission threshold (strict >)

  void validate() const;
  static PromptEngineConfig from_config(const Config& cfg);
};

struct TemplateSelection {
  std::size_t chosen_index = 0;     // into the applicable pool handed in
  std::vector<double> probs;        // softmax over the applicable pool
};

struct BuiltPrompt {
  Prompt prompt;
  std::string text;
  CostEstimate estimate;
  BehaviorFeatures features;
};

// Stage pipeline: feature extraction -> softmax template selection ->
// greedy component admission -> budget enforcement -> slot instantiation.
// Deterministic: identical inputs yield the identical final string.
class PromptEngine {
 public:
  PromptEngine(PoolSet pools, std::shared_ptr<const ScorerModel> scorer,
               PromptEngineConfig cfg = {}, BudgetLimits budget = {}, CostConfig cost = {},
               FeatureConfig feature_cfg = {});

  std::vector<const PromptTemplate*> applicable_templates(const ScenarioContext& s) const;

  double score_template(const PromptTemplate& t, const BehaviorFeatures& f,
                        const ScenarioContext& s) const;

  // pool must be non-empty and applicable to s. Ties in the argmax go to the
  // lexicographically smallest template id.
  TemplateSelection select_template(const std::vector<const PromptTemplate*>& pool,
                                    const BehaviorFeatures& f, const ScenarioContext& s) const;

  double prompt_utility(const Prompt& p, const BehaviorFeatures& f,
                        const ScenarioContext& s) const;

  double marginal_utility(const Prompt& p, const PromptComponent& c, const BehaviorFeatures& f,
                          const ScenarioContext& s) const;

  // Candidates are visited in descending standalone utility (ties by id);
  // a candidate joins the prompt iff its conditional gain strictly exceeds
  // tau_struct and the grown prompt stays within every budget axis.
  Prompt adapt_structure(Prompt p, const std::vector<const PromptComponent*>& candidates,
                         const BehaviorFeatures& f, const ScenarioContext& s) const;

  // Greedy eviction of the smallest-marginal-utility component until the
  // prompt fits. The template itself is never removed.
  Prompt enforce_budget(Prompt p, const BehaviorFeatures& f, const ScenarioContext& s) const;

  CostEstimate estimate_cost(const Prompt& p) const;

  // Fills both slots, appends accepted component texts, and truncates oldest
  // events until the final text fits the token budget implied by all axes.
  std::string instantiate(const Prompt& p, const BehaviorWindow& window, int64_t now) const;

  BuiltPrompt build(const BehaviorWindow& window, const TagCatalog& catalog,
                    const ScenarioContext& s, int64_t now) const;
  std::string build_prompt(const BehaviorWindow& window, const TagCatalog& catalog,
                           const ScenarioContext& s, int64_t now) const;

  const PoolSet& pools() const { return pools_; }
  const BudgetLimits& budget() const { return budget_; }
  const CostConfig& cost() const { return cost_; }
  const PromptEngineConfig& config() const { return cfg_; }
  const FeatureConfig& feature_config() const { return feature_cfg_; }

 private:
  std::size_t token_cap() const;  // token budget implied by all three axes

  PoolSet pools_;
  std::shared_ptr<const ScorerModel> scorer_;
  PromptEngineConfig cfg_;
  BudgetLimits budget_;
  CostConfig cost_;
  FeatureConfig feature_cfg_;
};

// Single universal next-query template, no components. Used when no pool
// files are configured.
PoolSet default_pools();

PoolSet load_pools(const std::string& template_pool_path,
                   const std::string& component_pool_path);  // "" = none

}  // namespace intentgate

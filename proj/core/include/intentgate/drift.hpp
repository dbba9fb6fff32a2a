#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "intentgate/behavior.hpp"

namespace intentgate {

class Config;

struct DriftConfig {
  double lambda1 = 0.4;  // weight of the entropy delta
  double lambda2 = 0.3;  // weight of (1 - jaccard)
  double lambda3 = 0.3;  // weight of the JS divergence
  double tau_trigger = 0.8;
  std::size_t min_window_size = 5;
  int64_t cooldown_ms = 0;  // 0 disables the cooldown

  void validate() const;  // lambdas >= 0 and sum to 1, tau in [0,1]
  static DriftConfig from_config(const Config& cfg);
};

// Baseline snapshot. Both prev_* fields are set together at every trigger;
// evaluations that do not fire leave the state untouched, so the baseline is
// always "the window at the last trigger", not "the last window seen".
struct DriftState {
  std::optional<TagDistribution> prev_dist;
  std::optional<TagSet> prev_tags;
  std::optional<int64_t> last_trigger_ts;

  bool operator==(const DriftState&) const = default;
};

struct DriftScore {
  double entropy_delta = 0.0;
  double jaccard = 1.0;
  double js = 0.0;
  double fused = 0.0;  // lambda1*entropy_delta + lambda2*(1-jaccard) + lambda3*js
};

enum class TriggerReason { bootstrap, drift_exceeded, below_threshold, cooldown, window_too_small };
const char* to_string(TriggerReason r);

struct TriggerDecision {
  bool fired = false;
  std::optional<DriftScore> score;  // present only when the score was computed
  TriggerReason reason = TriggerReason::below_threshold;
};

// Shannon entropy of p in bits, normalized by log2(max(2, |support|)) so the
// result lands in [0,1] and single-tag windows score 0.
double entropy(const TagDistribution& p);

// |H(p_t) - H(p_prev)| with both raw entropies normalized by the log of the
// union support size, keeping the delta comparable across support changes.
double entropy_delta(const TagDistribution& p_t, const TagDistribution& p_prev);

// |A n B| / |A u B|; two empty sets count as identical (1.0).
double jaccard(const TagSet& z_t, const TagSet& z_prev);

// Jensen-Shannon divergence, base 2, bounded to [0,1]. 0*log terms are 0.
double js_divergence(const TagDistribution& p_t, const TagDistribution& p_prev);

DriftScore drift_score(const TagDistribution& p_t, const TagSet& z_t,
                       const TagDistribution& p_prev, const TagSet& z_prev,
                       const DriftConfig& cfg);

// Pure state transition: evaluates the window against the baseline and
// returns the decision plus the next state. Fires on bootstrap (no baseline
// yet) or when the fused score strictly exceeds tau.
std::pair<TriggerDecision, DriftState> should_trigger(const DriftState& state,
                                                      const BehaviorWindow& window,
                                                      const TagCatalog& catalog,
                                                      const DriftConfig& cfg);

}  // namespace intentgate

#include "intentgate/drift.hpp"

#include <algorithm>
#include <cmath>

#include "intentgate/config.hpp"

namespace intentgate {

void DriftConfig::validate() const {
  if (lambda1 < 0.0 || lambda2 < 0.0 || lambda3 < 0.0)
    fail(Errc::config, "drift lambdas must be >= 0");
  if (std::abs(lambda1 + lambda2 + lambda3 - 1.0) > 1e-9)
    fail(Errc::config, "drift lambdas must sum to 1");
  if (tau_trigger < 0.0 || tau_trigger > 1.0)
    fail(Errc::config, "drift.tau must lie in [0,1]");
  if (min_window_size < 1) fail(Errc::config, "drift.min_window must be >= 1");
  if (cooldown_ms < 0) fail(Errc::config, "drift.cooldown_ms must be >= 0");
}

DriftConfig DriftConfig::from_config(const Config& cfg) {
  DriftConfig d;
  d.lambda1 = cfg.get_double("drift.lambda1", d.lambda1);
  d.lambda2 = cfg.get_double("drift.lambda2", d.lambda2);
  d.lambda3 = cfg.get_double("drift.lambda3", d.lambda3);
  d.tau_trigger = cfg.get_double("drift.tau", d.tau_trigger);
  d.min_window_size = static_cast<std::size_t>(
      cfg.get_int("drift.min_window", static_cast<int64_t>(d.min_window_size)));
  d.cooldown_ms = cfg.get_int("drift.cooldown_ms", d.cooldown_ms);
  d.validate();
  return d;
}

const char* to_string(TriggerReason r) {
  switch (r) {
    case TriggerReason::bootstrap: return "bootstrap";
    case TriggerReason::drift_exceeded: return "drift_exceeded";
    case TriggerReason::below_threshold: return "below_threshold";
    case TriggerReason::cooldown: return "cooldown";
    case TriggerReason::window_too_small: return "window_too_small";
  }
  return "below_threshold";
}

namespace {

double raw_entropy_bits(const TagDistribution& p) {
  double h = 0.0;
  for (const auto& [_, v] : p.probs)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

double norm_denominator(std::size_t support) {
  return std::log2(static_cast<double>(std::max<std::size_t>(2, support)));
}

}  // namespace

double entropy(const TagDistribution& p) {
  p.validate();
  return raw_entropy_bits(p) / norm_denominator(p.probs.size());
}

double entropy_delta(const TagDistribution& p_t, const TagDistribution& p_prev) {
  p_t.validate();
  p_prev.validate();
  TagSet u = p_t.support();
  for (const auto& [tag, _] : p_prev.probs) u.insert(tag);
  double denom = norm_denominator(u.size());
  return std::abs(raw_entropy_bits(p_t) - raw_entropy_bits(p_prev)) / denom;
}

double jaccard(const TagSet& z_t, const TagSet& z_prev) {
  if (z_t.empty() && z_prev.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& t : z_t) inter += z_prev.count(t);
  std::size_t uni = z_t.size() + z_prev.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double js_divergence(const TagDistribution& p_t, const TagDistribution& p_prev) {
  p_t.validate();
  p_prev.validate();
  // Walk the union of both (sorted) supports.
  auto it_a = p_t.probs.begin();
  auto it_b = p_prev.probs.begin();
  double kl_a = 0.0, kl_b = 0.0;
  auto consume = [&](double pa, double pb) {
    double m = 0.5 * (pa + pb);
    if (pa > 0.0) kl_a += pa * std::log2(pa / m);
    if (pb > 0.0) kl_b += pb * std::log2(pb / m);
  };
  while (it_a != p_t.probs.end() || it_b != p_prev.probs.end()) {
    if (it_b == p_prev.probs.end() ||
        (it_a != p_t.probs.end() && it_a->first < it_b->first)) {
      consume(it_a->second, 0.0);
      ++it_a;
    } else if (it_a == p_t.probs.end() || it_b->first < it_a->first) {
      consume(0.0, it_b->second);
      ++it_b;
    } else {
      consume(it_a->second, it_b->second);
      ++it_a;
      ++it_b;
    }
  }
  double js = 0.5 * kl_a + 0.5 * kl_b;
  return js < 0.0 ? 0.0 : js;  // guard fp noise near zero
}

DriftScore drift_score(const TagDistribution& p_t, const TagSet& z_t,
                       const TagDistribution& p_prev, const TagSet& z_prev,
                       const DriftConfig& cfg) {
  cfg.validate();
  DriftScore s;
  s.entropy_delta = entropy_delta(p_t, p_prev);
  s.jaccard = jaccard(z_t, z_prev);
  s.js = js_divergence(p_t, p_prev);
  s.fused = cfg.lambda1 * s.entropy_delta + cfg.lambda2 * (1.0 - s.jaccard) + cfg.lambda3 * s.js;
  return s;
}

std::pair<TriggerDecision, DriftState> should_trigger(const DriftState& state,
                                                      const BehaviorWindow& window,
                                                      const TagCatalog& catalog,
                                                      const DriftConfig& cfg) {
  cfg.validate();
  if (window.size() < cfg.min_window_size)
    return {{false, std::nullopt, TriggerReason::window_too_small}, state};

  auto [tags, dist] = map_to_tags(window, catalog);
  int64_t now = window.newest_ts();

  if (!state.prev_dist.has_value()) {
    DriftState next;
    next.prev_dist = std::move(dist);
    next.prev_tags = std::move(tags);
    next.last_trigger_ts = now;
    return {{true, std::nullopt, TriggerReason::bootstrap}, std::move(next)};
  }

  if (cfg.cooldown_ms > 0 && state.last_trigger_ts.has_value() &&
      now - *state.last_trigger_ts < cfg.cooldown_ms)
    return {{false, std::nullopt, TriggerReason::cooldown}, state};

  DriftScore s = drift_score(dist, tags, *state.prev_dist, *state.prev_tags, cfg);
  if (s.fused > cfg.tau_trigger) {
    DriftState next;
    next.prev_dist = std::move(dist);
    next.prev_tags = std::move(tags);
    next.last_trigger_ts = now;
    return {{true, s, TriggerReason::drift_exceeded}, std::move(next)};
  }
  return {{false, s, TriggerReason::below_threshold}, state};
}

}  // namespace intentgate

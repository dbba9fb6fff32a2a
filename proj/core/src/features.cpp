#include "intentgate/features.hpp"

#include <cmath>

#include "intentgate/config.hpp"
#include "intentgate/drift.hpp"

namespace intentgate {

void FeatureConfig::validate() const {
  if (!(recency_halflife_ms > 0.0))
    fail(Errc::config, "feature.recency_halflife_ms must be > 0");
  if (!(freq_span_floor_ms > 0.0))
    fail(Errc::config, "feature.freq_span_floor_ms must be > 0");
}

FeatureConfig FeatureConfig::from_config(const Config& cfg) {
  FeatureConfig f;
  f.recency_halflife_ms = cfg.get_double("feature.recency_halflife_ms", f.recency_halflife_ms);
  f.freq_span_floor_ms = cfg.get_double("feature.freq_span_floor_ms", f.freq_span_floor_ms);
  f.validate();
  return f;
}

BehaviorFeatures extract_features(const BehaviorWindow& window, const TagCatalog& catalog,
                                  int64_t now, const FeatureConfig& cfg) {
  cfg.validate();
  if (window.empty()) fail(Errc::empty_window, "extract_features requires a non-empty window");
  if (now < window.newest_ts())
    fail(Errc::data, "feature extraction time precedes the newest window event");

  BehaviorFeatures f;
  const double n = static_cast<double>(window.size());

  for (const auto& e : window.events)
    f.act_dist[static_cast<std::size_t>(e.action)] += 1.0;
  for (auto& v : f.act_dist) v /= n;

  double acc = 0.0;
  for (const auto& e : window.events)
    acc += std::exp(-static_cast<double>(now - e.timestamp) / cfg.recency_halflife_ms);
  f.recency = acc / n;

  auto [tags, dist] = map_to_tags(window, catalog);
  f.diversity = entropy(dist);

  double span_ms = std::max(static_cast<double>(window.newest_ts() - window.oldest_ts()),
                            cfg.freq_span_floor_ms);
  double per_minute = n / (span_ms / 60000.0);
  f.frequency = per_minute / (per_minute + 1.0);
  return f;
}

}  // namespace intentgate

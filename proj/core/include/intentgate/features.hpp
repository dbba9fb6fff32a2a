#pragma once

#include <array>
#include <cstdint>

#include "intentgate/behavior.hpp"

namespace intentgate {

class Config;

struct FeatureConfig {
  double recency_halflife_ms = 3'600'000.0;  // decay horizon for recency
  double freq_span_floor_ms = 1000.0;        // avoids div-by-zero on tight windows

  void validate() const;
  static FeatureConfig from_config(const Config& cfg);
};

// Behavior summary over a window; every component lies in [0,1].
struct BehaviorFeatures {
  std::array<double, kActionTypeCount> act_dist{};  // click, cart, favorite, purchase
  double recency = 0.0;    // mean exp(-(now - t_i) / halflife)
  double diversity = 0.0;  // normalized tag entropy
  double frequency = 0.0;  // k/(k+1), k = events per minute over the span

  bool operator==(const BehaviorFeatures&) const = default;
};

BehaviorFeatures extract_features(const BehaviorWindow& window, const TagCatalog& catalog,
                                  int64_t now, const FeatureConfig& cfg = {});

}  // namespace intentgate

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "intentgate/behavior.hpp"

namespace intentgate {

class Config;

enum class SampleSource { behavior_driven, co_purchase, llm_rewrite, human };
inline constexpr std::array<SampleSource, 4> kSampleSources = {
    SampleSource::behavior_driven, SampleSource::co_purchase, SampleSource::llm_rewrite,
    SampleSource::human};

const char* to_string(SampleSource s);
std::optional<SampleSource> sample_source_from_string(std::string_view s);

struct TrainingSample {
  std::vector<BehaviorEvent> behavior;  // non-empty, every timestamp < ref_time
  std::string target_query;             // non-empty
  SampleSource source = SampleSource::behavior_driven;
  int64_t ref_time = 0;

  void validate() const;
};

using Sessions = std::map<std::string, std::vector<BehaviorEvent>>;  // user -> sorted events

struct SearchRecord {
  std::string user;
  int64_t ts = 0;
  std::string query;
};
using SearchLog = std::map<std::string, std::vector<SearchRecord>>;  // user -> sorted by ts

// Pairs each purchase with the first search query the same user issued within
// link_window_ms after it. The sample's behavior is the user's history up to
// and including the purchase, capped at behavior_cap events.
std::vector<TrainingSample> build_behavior_driven(const Sessions& purchase_log,
                                                  const SearchLog& search_log,
                                                  int64_t link_window_ms,
                                                  std::size_t behavior_cap = 50);

struct CoPurchaseMatrix {
  // item -> (co-item, weight), rows sorted by descending weight.
  std::map<std::string, std::vector<std::pair<std::string, double>>> rows;

  void validate() const;  // weights > 0, no self-pairs, rows sorted
};

// For each purchase seed that has a matrix row, emits one sample per top-k
// co-item, targeting the co-item's catalog tag.
std::vector<TrainingSample> build_co_purchase(const CoPurchaseMatrix& matrix,
                                              const TagCatalog& catalog,
                                              const std::vector<BehaviorEvent>& seed_events,
                                              std::size_t top_k);

using Rewriter = std::function<std::string(const std::string&)>;

// Copies samples with the target passed through the rewriter and the source
// flipped to llm_rewrite. Samples whose rewrite fails or comes back empty are
// skipped with a warning. The default rewriter is the identity.
std::vector<TrainingSample> augment_rewrite(const std::vector<TrainingSample>& samples,
                                            const Rewriter& rewriter = {});

// JSONL of TrainingSample; any malformed line is an error naming the line
// number. Sources are forced to human.
std::vector<TrainingSample> ingest_human(const std::string& path);

struct MixConfig {
  double ratio_behavior_driven = 0.60;
  double ratio_co_purchase = 0.20;
  double ratio_llm_rewrite = 0.15;
  double ratio_human = 0.05;
  std::size_t total_size = 0;

  void validate() const;  // ratios >= 0 and sum to 1 within 1e-9
  std::array<double, 4> ratios() const;
};

// Largest-remainder apportionment; quotas always sum to total. Remainder ties
// go to the earlier source in kSampleSources order.
std::array<std::size_t, 4> apportion_quotas(const std::array<double, 4>& ratios,
                                            std::size_t total);

// Draws each source's quota without replacement using a seeded shuffle and
// concatenates in kSampleSources order. A pool smaller than its quota is an
// error naming the source and the shortfall.
std::vector<TrainingSample> mix(const std::map<SampleSource, std::vector<TrainingSample>>& pools,
                                const MixConfig& cfg, uint64_t seed);

}  // namespace intentgate

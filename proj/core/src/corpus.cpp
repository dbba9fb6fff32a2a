#include "intentgate/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "intentgate/config.hpp"
#include "intentgate/io.hpp"
#include "intentgate/rng.hpp"

namespace intentgate {

const char* to_string(SampleSource s) {
  switch (s) {
    case SampleSource::behavior_driven: return "behavior_driven";
    case SampleSource::co_purchase: return "co_purchase";
    case SampleSource::llm_rewrite: return "llm_rewrite";
    case SampleSource::human: return "human";
  }
  return "behavior_driven";
}

std::optional<SampleSource> sample_source_from_string(std::string_view s) {
  if (s == "behavior_driven") return SampleSource::behavior_driven;
  if (s == "co_purchase") return SampleSource::co_purchase;
  if (s == "llm_rewrite") return SampleSource::llm_rewrite;
  if (s == "human") return SampleSource::human;
  return std::nullopt;
}

void TrainingSample::validate() const {
  if (behavior.empty()) fail(Errc::data, "training sample behavior must be non-empty");
  if (target_query.empty()) fail(Errc::data, "training sample target_query must be non-empty");
  for (const auto& e : behavior) {
    if (e.item_id.empty()) fail(Errc::data, "training sample event item_id must be non-empty");
    if (e.timestamp < 0) fail(Errc::data, "training sample event timestamp must be >= 0");
    if (e.timestamp >= ref_time)
      fail(Errc::data, "training sample behavior timestamps must precede ref_time");
  }
}

std::vector<TrainingSample> build_behavior_driven(const Sessions& purchase_log,
                                                  const SearchLog& search_log,
                                                  int64_t link_window_ms,
                                                  std::size_t behavior_cap) {
  if (link_window_ms <= 0) fail(Errc::config, "corpus.link_window_ms must be > 0");
  if (behavior_cap == 0) fail(Errc::config, "corpus.behavior_cap must be >= 1");

  std::vector<TrainingSample> out;
  for (const auto& [user, events] : purchase_log) {
    auto searches_it = search_log.find(user);
    if (searches_it == search_log.end()) continue;
    const auto& searches = searches_it->second;

    for (std::size_t i = 0; i < events.size(); ++i) {
      if (events[i].action != ActionType::purchase) continue;
      const int64_t t = events[i].timestamp;
      // First search strictly after the purchase, at most link_window_ms later.
      auto s = std::upper_bound(searches.begin(), searches.end(), t,
                                [](int64_t ts, const SearchRecord& r) { return ts < r.ts; });
      if (s == searches.end() || s->ts > t + link_window_ms) continue;

      TrainingSample sample;
      std::size_t begin = (i + 1 > behavior_cap) ? i + 1 - behavior_cap : 0;
      sample.behavior.assign(events.begin() + static_cast<std::ptrdiff_t>(begin),
                             events.begin() + static_cast<std::ptrdiff_t>(i + 1));
      sample.target_query = s->query;
      sample.source = SampleSource::behavior_driven;
      sample.ref_time = s->ts;
      sample.validate();
      out.push_back(std::move(sample));
    }
  }
  return out;
}

void CoPurchaseMatrix::validate() const {
  for (const auto& [item, row] : rows) {
    if (item.empty()) fail(Errc::data, "co-purchase matrix item must be non-empty");
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& [co_item, weight] : row) {
      if (co_item.empty()) fail(Errc::data, "co-purchase co-item must be non-empty");
      if (co_item == item)
        fail(Errc::data, "co-purchase matrix row for '" + item + "' pairs the item with itself");
      if (!(weight > 0.0))
        fail(Errc::data, "co-purchase weight for ('" + item + "','" + co_item + "') must be > 0");
      if (weight > prev)
        fail(Errc::data, "co-purchase row for '" + item + "' is not sorted by descending weight");
      prev = weight;
    }
  }
}

std::vector<TrainingSample> build_co_purchase(const CoPurchaseMatrix& matrix,
                                              const TagCatalog& catalog,
                                              const std::vector<BehaviorEvent>& seed_events,
                                              std::size_t top_k) {
  if (top_k == 0) fail(Errc::config, "corpus.top_k must be >= 1");
  matrix.validate();

  std::vector<TrainingSample> out;
  for (const auto& seed : seed_events) {
    if (seed.action != ActionType::purchase) continue;
    auto row = matrix.rows.find(seed.item_id);
    if (row == matrix.rows.end()) continue;
    std::size_t take = std::min(top_k, row->second.size());
    for (std::size_t i = 0; i < take; ++i) {
      TrainingSample sample;
      sample.behavior = {seed};
      sample.target_query = catalog.tag_of(row->second[i].first);
      sample.source = SampleSource::co_purchase;
      sample.ref_time = seed.timestamp + 1;  // synthetic "just after the purchase"
      sample.validate();
      out.push_back(std::move(sample));
    }
  }
  return out;
}

std::vector<TrainingSample> augment_rewrite(const std::vector<TrainingSample>& samples,
                                            const Rewriter& rewriter) {
  std::vector<TrainingSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    std::string rewritten;
    if (rewriter) {
      try {
        rewritten = rewriter(s.target_query);
      } catch (const std::exception& e) {
        std::cerr << "warning: rewrite failed for '" << s.target_query << "': " << e.what()
                  << "; sample skipped\n";
        continue;
      }
    } else {
      rewritten = s.target_query;  // identity default
    }
    if (rewritten.empty()) {
      std::cerr << "warning: rewrite of '" << s.target_query << "' came back empty; sample skipped\n";
      continue;
    }
    TrainingSample copy = s;
    copy.target_query = std::move(rewritten);
    copy.source = SampleSource::llm_rewrite;
    out.push_back(std::move(copy));
  }
  return out;
}

std::vector<TrainingSample> ingest_human(const std::string& path) {
  std::vector<TrainingSample> samples = load_samples_jsonl(path);
  for (auto& s : samples) s.source = SampleSource::human;
  return samples;
}

void MixConfig::validate() const {
  auto r = ratios();
  double sum = 0.0;
  for (double v : r) {
    if (v < 0.0) fail(Errc::config, "corpus mixing ratios must be >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    fail(Errc::config, "corpus mixing ratios sum to " + std::to_string(sum) + ", expected 1");
}

std::array<double, 4> MixConfig::ratios() const {
  return {ratio_behavior_driven, ratio_co_purchase, ratio_llm_rewrite, ratio_human};
}

std::array<std::size_t, 4> apportion_quotas(const std::array<double, 4>& ratios,
                                            std::size_t total) {
  double sum = 0.0;
  for (double r : ratios) {
    if (r < 0.0) fail(Errc::config, "apportionment ratios must be >= 0");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    fail(Errc::config, "apportionment ratios must sum to 1");

  std::array<std::size_t, 4> q{};
  std::array<double, 4> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    double exact = ratios[i] * static_cast<double>(total);
    q[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - std::floor(exact);
    assigned += q[i];
  }

  // Hand out the leftover units by descending remainder; ties go to the
  // earlier source so results are order-stable.
  std::array<std::size_t, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return a < b;
  });
  std::size_t i = 0;
  while (assigned < total) {
    q[order[i % 4]] += 1;
    ++assigned;
    ++i;
  }
  // Floating-point drift in the ratio sum can over-assign by a unit; claw it
  // back from the smallest remainders.
  i = 3;
  while (assigned > total) {
    std::size_t idx = order[i % 4];
    if (q[idx] > 0) {
      q[idx] -= 1;
      --assigned;
    }
    i = (i == 0) ? 3 : i - 1;
  }
  return q;
}

std::vector<TrainingSample> mix(const std::map<SampleSource, std::vector<TrainingSample>>& pools,
                                const MixConfig& cfg, uint64_t seed) {
  cfg.validate();
  auto quotas = apportion_quotas(cfg.ratios(), cfg.total_size);

  SplitMix64 rng(seed);
  std::vector<TrainingSample> corpus;
  corpus.reserve(cfg.total_size);

  for (std::size_t k = 0; k < kSampleSources.size(); ++k) {
    const std::size_t quota = quotas[k];
    if (quota == 0) continue;
    auto it = pools.find(kSampleSources[k]);
    const std::size_t avail = it == pools.end() ? 0 : it->second.size();
    if (avail < quota)
      fail(Errc::insufficient_samples,
           std::string("source '") + to_string(kSampleSources[k]) + "' holds " +
               std::to_string(avail) + " sample(s) but the mix needs " + std::to_string(quota));

    std::vector<std::size_t> idx(avail);
    for (std::size_t j = 0; j < avail; ++j) idx[j] = j;
    rng.shuffle(idx);
    for (std::size_t j = 0; j < quota; ++j) corpus.push_back(it->second[idx[j]]);
  }
  return corpus;
}

}  // namespace intentgate

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "intentgate/behavior.hpp"
#include "intentgate/corpus.hpp"
#include "intentgate/drift.hpp"
#include "intentgate/features.hpp"
#include "intentgate/generation.hpp"
#include "intentgate/prompt.hpp"

namespace intentgate {

class Config;

enum class PolicyKind { always, every_k, drift_gated };

struct PolicySpec {
  PolicyKind kind = PolicyKind::drift_gated;
  std::size_t k = 1;  // every_k: fires on the k-th, 2k-th, ... event (1-based)
  DriftConfig drift;

  std::string name() const;
  // "always" | "every-k=K" | "drift"
  static PolicySpec parse(const std::string& text, const DriftConfig& drift_defaults);
};

struct StreamSegment {
  TagDistribution dist;
  std::size_t length = 0;
};

struct SyntheticStreamSpec {
  std::vector<StreamSegment> segments;
  int64_t gap_ms = 1000;
  uint64_t seed = 0;
  std::string user = "synth";
  int64_t start_ts = 0;

  void validate() const;
  static SyntheticStreamSpec from_json_file(const std::string& path);
};

// One record per evaluated event; fired records carry the prompt hash and
// either the generated query or a generation-failure mark.
struct ReplayRecord {
  std::size_t event_index = 0;
  bool fired = false;
  std::string reason;
  std::optional<DriftScore> score;
  std::optional<std::string> prompt_hash;  // fnv1a-64 of the final text, hex
  std::optional<std::string> query;
  bool generation_failed = false;
  std::optional<double> drift_ms;
  std::optional<double> prompt_ms;
  std::optional<double> generate_ms;

  double total_latency_ms() const;
};

struct ReplayTrace {
  std::string user;
  std::string policy;
  std::size_t event_count = 0;
  std::vector<ReplayRecord> records;  // size == event_count
};

// simulated: stage latencies come from the cost model, keeping CI byte-stable.
// wall: stages are timed with a monotonic clock.
enum class ClockMode { simulated, wall };

struct PipelineConfig {
  WindowPolicy window;
  int64_t out_of_order_tolerance_ms = 5000;
  FeatureConfig feature;
  ScenarioContext scenario{"feed", {}};
  ClockMode clock = ClockMode::simulated;
};

ReplayTrace replay(const std::string& user, const std::vector<BehaviorEvent>& session,
                   const PolicySpec& policy, const PromptEngine& engine,
                   const Generator& generator, const TagCatalog& catalog,
                   const PipelineConfig& pc);

// Sessions run independently (optionally across jobs threads); results merge
// in user-id order, so the trace vector is deterministic either way.
std::vector<ReplayTrace> replay_sessions(const Sessions& sessions, const PolicySpec& policy,
                                         const PromptEngine& engine, const Generator& generator,
                                         const TagCatalog& catalog, const PipelineConfig& pc,
                                         std::size_t jobs = 1);

// Seeded segment-wise stream; returns the events plus the ground-truth shift
// indices (index of the first event of each later segment).
std::pair<std::vector<BehaviorEvent>, std::vector<std::size_t>> synth_sessions(
    const SyntheticStreamSpec& spec, const TagCatalog& catalog);

// Fabricates items_per_tag items for every tag the spec mentions, so synth
// can run without a prebuilt catalog.
TagCatalog synthetic_catalog(const SyntheticStreamSpec& spec, std::size_t items_per_tag = 4);

// Nearest-rank percentiles: sorted[ceil(p/100 * n)] with 1-based indexing.
// latencies must be non-empty; ranks must lie in (0, 100].
std::vector<double> compute_percentiles(std::vector<double> latencies,
                                        const std::vector<int>& ranks);

struct ShiftMetrics {
  double precision = 1.0;  // matched / non-bootstrap triggers (vacuous: 1.0)
  double recall = 1.0;     // matched shifts / total shifts   (vacuous: 1.0)
  std::size_t matched = 0;
  std::size_t considered_triggers = 0;  // fired, bootstrap excluded
  std::size_t shifts = 0;
};

// Greedy earliest matching: a trigger at index i matches the earliest
// unmatched shift g with g <= i <= g + match_window.
ShiftMetrics detect_shift_metrics(const ReplayTrace& trace,
                                  const std::vector<std::size_t>& ground_truth,
                                  std::size_t match_window = 10);

using GroundTruth = std::map<std::string, std::vector<std::size_t>>;  // user -> shifts

GroundTruth load_ground_truth(const std::string& path);
void save_ground_truth(const GroundTruth& truth, const std::string& path);

struct MetricsReport {
  std::string policy;
  std::size_t events = 0;
  std::size_t evaluations = 0;
  std::size_t trigger_count = 0;
  std::size_t bootstrap_count = 0;
  double trigger_rate = 0.0;
  std::optional<double> precision;  // only with ground truth
  std::optional<double> recall;
  std::optional<double> p50_ms, p75_ms, p90_ms, p95_ms;  // per-trigger latency
  std::optional<double> drift_mean_ms, prompt_mean_ms, generate_mean_ms;
  std::size_t generation_failures = 0;

  static MetricsReport compute(const std::vector<ReplayTrace>& traces,
                               const std::optional<GroundTruth>& truth,
                               std::size_t match_window = 10);
};

enum class ReportFormat { json, csv };

std::string report_to_json_text(const MetricsReport& report);
std::string reports_to_csv_text(const std::vector<MetricsReport>& reports);

// JSON emits the single report verbatim (an array when several are given);
// CSV flattens one row per policy. Identical numeric rendering either way.
void emit_report(const std::vector<MetricsReport>& reports, ReportFormat format,
                 const std::string& path);

struct ReplaySettings {
  ClockMode clock = ClockMode::simulated;
  std::size_t match_window = 10;
  std::string scenario_id = "feed";
  std::string template_pool;   // path, "" = built-in default pool
  std::string component_pool;  // path, "" = none

  static ReplaySettings from_config(const Config& cfg);
};

}  // namespace intentgate

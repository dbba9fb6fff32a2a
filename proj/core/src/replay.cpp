#include "intentgate/replay.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "intentgate/config.hpp"
#include "intentgate/io.hpp"
#include "intentgate/rng.hpp"
#include "intentgate/tokenizer.hpp"

namespace intentgate {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

constexpr const char* kAlwaysReason = "always";
constexpr const char* kOnCycleReason = "on_cycle";
constexpr const char* kOffCycleReason = "off_cycle";

std::string fnv1a_hex(const std::string& text) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double wall_ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

std::string PolicySpec::name() const {
  switch (kind) {
    case PolicyKind::always:
      return "always";
    case PolicyKind::every_k:
      return "every-k=" + std::to_string(k);
    case PolicyKind::drift_gated:
      return "drift";
  }
  fail(Errc::config, "unknown policy kind");
}

PolicySpec PolicySpec::parse(const std::string& text, const DriftConfig& drift_defaults) {
  PolicySpec spec;
  if (text == "always") {
    spec.kind = PolicyKind::always;
    return spec;
  }
  if (text == "drift") {
    spec.kind = PolicyKind::drift_gated;
    spec.drift = drift_defaults;
    return spec;
  }
  constexpr const char* kPrefix = "every-k=";
  if (text.rfind(kPrefix, 0) == 0) {
    std::string num = text.substr(std::string(kPrefix).size());
    try {
      std::size_t used = 0;
      long long k = std::stoll(num, &used);
      if (used == num.size() && k >= 1) {
        spec.kind = PolicyKind::every_k;
        spec.k = static_cast<std::size_t>(k);
        return spec;
      }
    } catch (const std::exception&) {
    }
    fail(Errc::config, "every-k needs a positive integer, got '" + num + "'");
  }
  fail(Errc::config, "unknown policy '" + text + "' (expected always | every-k=K | drift)");
}

void SyntheticStreamSpec::validate() const {
  if (segments.empty()) fail(Errc::config, "synthetic stream needs at least one segment");
  for (const auto& seg : segments) {
    if (seg.length == 0) fail(Errc::config, "synthetic segment length must be >= 1");
    seg.dist.validate();
  }
  if (gap_ms <= 0) fail(Errc::config, "gap_ms must be positive");
  if (user.empty()) fail(Errc::config, "synthetic user id must be non-empty");
  if (start_ts < 0) fail(Errc::config, "start_ts must be >= 0");
}

SyntheticStreamSpec SyntheticStreamSpec::from_json_file(const std::string& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    fail(Errc::data, path + ": expected a JSON object");
  SyntheticStreamSpec spec;
  if (!j.contains("segments") || !j["segments"].is_array() || j["segments"].empty())
    fail(Errc::data, path + ": missing non-empty array 'segments'");
  for (const auto& s : j["segments"]) {
    if (!s.is_object() || !s.contains("tags") || !s["tags"].is_object() ||
        !s.contains("length") || !s["length"].is_number_unsigned())
      fail(Errc::data, path + ": each segment needs a 'tags' object and an unsigned 'length'");
    StreamSegment seg;
    for (const auto& [tag, prob] : s["tags"].items()) {
      if (tag.empty() || !prob.is_number())
        fail(Errc::data, path + ": segment tags must map names to probabilities");
      seg.dist.probs[tag] = prob.get<double>();
    }
    seg.length = s["length"].get<std::size_t>();
    spec.segments.push_back(std::move(seg));
  }
  if (j.contains("gap_ms")) spec.gap_ms = j["gap_ms"].get<int64_t>();
  if (j.contains("seed")) spec.seed = j["seed"].get<uint64_t>();
  if (j.contains("user")) spec.user = j["user"].get<std::string>();
  if (j.contains("start_ts")) spec.start_ts = j["start_ts"].get<int64_t>();
  spec.validate();
  return spec;
}

double ReplayRecord::total_latency_ms() const {
  return drift_ms.value_or(0.0) + prompt_ms.value_or(0.0) + generate_ms.value_or(0.0);
}

ReplayTrace replay(const std::string& user, const std::vector<BehaviorEvent>& session,
                   const PolicySpec& policy, const PromptEngine& engine,
                   const Generator& generator, const TagCatalog& catalog,
                   const PipelineConfig& pc) {
  if (user.empty()) fail(Errc::data, "replay needs a non-empty user id");
  pc.window.validate();
  if (policy.kind == PolicyKind::drift_gated) policy.drift.validate();

  const bool wall = pc.clock == ClockMode::wall;
  ReplayTrace trace;
  trace.user = user;
  trace.policy = policy.name();
  trace.event_count = session.size();
  trace.records.reserve(session.size());

  EventStore store(pc.window, pc.out_of_order_tolerance_ms);
  DriftState state;

  for (std::size_t i = 0; i < session.size(); ++i) {
    store.append(session[i]);
    ReplayRecord rec;
    rec.event_index = i;

    switch (policy.kind) {
      case PolicyKind::always:
        rec.fired = true;
        rec.reason = kAlwaysReason;
        break;
      case PolicyKind::every_k:
        rec.fired = (i + 1) % policy.k == 0;
        rec.reason = rec.fired ? kOnCycleReason : kOffCycleReason;
        break;
      case PolicyKind::drift_gated: {
        auto start = std::chrono::steady_clock::now();
        auto [decision, next] = should_trigger(state, store.window(), catalog, policy.drift);
        rec.drift_ms = wall ? wall_ms_since(start) : 0.0;
        state = std::move(next);
        rec.fired = decision.fired;
        rec.reason = to_string(decision.reason);
        rec.score = decision.score;
        break;
      }
    }

    if (rec.fired) {
      int64_t now = store.newest_ts().value();
      auto prompt_start = std::chrono::steady_clock::now();
      BuiltPrompt built = engine.build(store.window(), catalog, pc.scenario, now);
      rec.prompt_ms = wall ? wall_ms_since(prompt_start) : built.estimate.latency_ms;
      rec.prompt_hash = fnv1a_hex(built.text);

      auto gen_start = std::chrono::steady_clock::now();
      try {
        GeneratedQuery q = generator.generate(built.text);
        rec.query = q.text;
        if (wall) {
          rec.generate_ms = wall_ms_since(gen_start);
        } else {
          const CostConfig& cost = engine.cost();
          rec.generate_ms =
              cost.latency_a * static_cast<double>(token_count(q.text)) + cost.latency_b;
        }
      } catch (const Error& e) {
        if (e.code() != Errc::generation_failed) throw;
        rec.generation_failed = true;
        if (wall) rec.generate_ms = wall_ms_since(gen_start);
      }
    }
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

std::vector<ReplayTrace> replay_sessions(const Sessions& sessions, const PolicySpec& policy,
                                         const PromptEngine& engine, const Generator& generator,
                                         const TagCatalog& catalog, const PipelineConfig& pc,
                                         std::size_t jobs) {
  std::vector<const Sessions::value_type*> order;
  order.reserve(sessions.size());
  for (const auto& entry : sessions) order.push_back(&entry);

  std::vector<ReplayTrace> traces(order.size());
  if (order.empty()) return traces;

  jobs = std::max<std::size_t>(1, std::min(jobs, order.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < order.size(); ++i)
      traces[i] = replay(order[i]->first, order[i]->second, policy, engine, generator, catalog, pc);
    return traces;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(order.size());
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= order.size()) return;
      try {
        traces[i] =
            replay(order[i]->first, order[i]->second, policy, engine, generator, catalog, pc);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return traces;
}

std::pair<std::vector<BehaviorEvent>, std::vector<std::size_t>> synth_sessions(
    const SyntheticStreamSpec& spec, const TagCatalog& catalog) {
  spec.validate();
  auto by_tag = catalog.items_by_tag();
  for (const auto& seg : spec.segments)
    for (const auto& [tag, _] : seg.dist.probs)
      if (!by_tag.count(tag) || by_tag.at(tag).empty())
        fail(Errc::data, "catalog has no items for tag '" + tag + "'");

  SplitMix64 rng(spec.seed);
  std::vector<BehaviorEvent> events;
  std::vector<std::size_t> shifts;
  int64_t ts = spec.start_ts;
  for (std::size_t s = 0; s < spec.segments.size(); ++s) {
    const auto& seg = spec.segments[s];
    if (s > 0) shifts.push_back(events.size());
    for (std::size_t n = 0; n < seg.length; ++n) {
      double u = rng.next_double();
      double cum = 0.0;
      const std::string* tag = nullptr;
      for (const auto& [name, p] : seg.dist.probs) {
        cum += p;
        tag = &name;
        if (u < cum) break;
      }
      const auto& items = by_tag.at(*tag);
      BehaviorEvent e;
      e.item_id = items[rng.next_below(items.size())];
      e.action = static_cast<ActionType>(rng.next_below(kActionTypeCount));
      e.timestamp = ts;
      events.push_back(std::move(e));
      ts += spec.gap_ms;
    }
  }
  return {std::move(events), std::move(shifts)};
}

TagCatalog synthetic_catalog(const SyntheticStreamSpec& spec, std::size_t items_per_tag) {
  spec.validate();
  if (items_per_tag == 0) fail(Errc::config, "items_per_tag must be >= 1");
  std::map<std::string, std::string> item_to_tag;
  for (const auto& seg : spec.segments)
    for (const auto& [tag, _] : seg.dist.probs)
      for (std::size_t j = 0; j < items_per_tag; ++j)
        item_to_tag.emplace(tag + "_" + std::to_string(j), tag);
  return TagCatalog(std::move(item_to_tag));
}

std::vector<double> compute_percentiles(std::vector<double> latencies,
                                        const std::vector<int>& ranks) {
  if (latencies.empty()) fail(Errc::data, "cannot take percentiles of an empty list");
  for (int r : ranks)
    if (r <= 0 || r > 100) fail(Errc::config, "percentile rank must lie in (0, 100]");
  std::sort(latencies.begin(), latencies.end());
  std::vector<double> out;
  out.reserve(ranks.size());
  for (int r : ranks) {
    // Integer ceil(r/100 * n). Floating point drifts here: 0.55 * 20 rounds
    // to 11.000000000000002, whose ceil lands one rank too high.
    std::size_t idx = (static_cast<std::size_t>(r) * latencies.size() + 99) / 100;
    out.push_back(latencies[idx - 1]);
  }
  return out;
}

ShiftMetrics detect_shift_metrics(const ReplayTrace& trace,
                                  const std::vector<std::size_t>& ground_truth,
                                  std::size_t match_window) {
  std::vector<std::size_t> shifts = ground_truth;
  std::sort(shifts.begin(), shifts.end());
  shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());

  const std::string bootstrap = to_string(TriggerReason::bootstrap);
  ShiftMetrics m;
  m.shifts = shifts.size();
  std::size_t s = 0;
  for (const auto& rec : trace.records) {
    if (!rec.fired || rec.reason == bootstrap) continue;
    ++m.considered_triggers;
    std::size_t i = rec.event_index;
    while (s < shifts.size() && shifts[s] + match_window < i) ++s;
    if (s < shifts.size() && shifts[s] <= i) {
      ++m.matched;
      ++s;
    }
  }
  m.precision = m.considered_triggers == 0
                    ? 1.0
                    : static_cast<double>(m.matched) / static_cast<double>(m.considered_triggers);
  m.recall = m.shifts == 0 ? 1.0 : static_cast<double>(m.matched) / static_cast<double>(m.shifts);
  return m;
}

GroundTruth load_ground_truth(const std::string& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    fail(Errc::data, path + ": expected a JSON object mapping users to shift indices");
  GroundTruth truth;
  for (const auto& [user, arr] : j.items()) {
    if (!arr.is_array()) fail(Errc::data, path + ": shifts for '" + user + "' must be an array");
    std::vector<std::size_t>& shifts = truth[user];
    for (const auto& v : arr) {
      if (!v.is_number_unsigned())
        fail(Errc::data, path + ": shifts for '" + user + "' must be non-negative integers");
      shifts.push_back(v.get<std::size_t>());
    }
  }
  return truth;
}

void save_ground_truth(const GroundTruth& truth, const std::string& path) {
  ordered j = ordered::object();
  for (const auto& [user, shifts] : truth) j[user] = shifts;
  write_text_file(path, j.dump(2) + "\n");
}

MetricsReport MetricsReport::compute(const std::vector<ReplayTrace>& traces,
                                     const std::optional<GroundTruth>& truth,
                                     std::size_t match_window) {
  MetricsReport r;
  if (!traces.empty()) r.policy = traces.front().policy;

  const std::string bootstrap = to_string(TriggerReason::bootstrap);
  std::vector<double> per_trigger;
  double drift_sum = 0.0, prompt_sum = 0.0, generate_sum = 0.0;
  std::size_t drift_n = 0, prompt_n = 0, generate_n = 0;
  std::size_t matched = 0, considered = 0, shifts = 0;

  for (const auto& trace : traces) {
    r.events += trace.event_count;
    for (const auto& rec : trace.records) {
      if (rec.reason != kOffCycleReason) ++r.evaluations;
      if (rec.fired) {
        ++r.trigger_count;
        if (rec.reason == bootstrap) ++r.bootstrap_count;
        per_trigger.push_back(rec.total_latency_ms());
      }
      if (rec.drift_ms) {
        drift_sum += *rec.drift_ms;
        ++drift_n;
      }
      if (rec.prompt_ms) {
        prompt_sum += *rec.prompt_ms;
        ++prompt_n;
      }
      if (rec.generate_ms) {
        generate_sum += *rec.generate_ms;
        ++generate_n;
      }
      if (rec.generation_failed) ++r.generation_failures;
    }
    if (truth) {
      static const std::vector<std::size_t> kNone;
      auto it = truth->find(trace.user);
      ShiftMetrics m =
          detect_shift_metrics(trace, it == truth->end() ? kNone : it->second, match_window);
      matched += m.matched;
      considered += m.considered_triggers;
      shifts += m.shifts;
    }
  }

  r.trigger_rate = r.events == 0 ? 0.0
                                 : static_cast<double>(r.trigger_count) /
                                       static_cast<double>(r.events);
  if (truth) {
    r.precision = considered == 0
                      ? 1.0
                      : static_cast<double>(matched) / static_cast<double>(considered);
    r.recall = shifts == 0 ? 1.0 : static_cast<double>(matched) / static_cast<double>(shifts);
  }
  if (!per_trigger.empty()) {
    auto p = compute_percentiles(per_trigger, {50, 75, 90, 95});
    r.p50_ms = p[0];
    r.p75_ms = p[1];
    r.p90_ms = p[2];
    r.p95_ms = p[3];
  }
  if (drift_n) r.drift_mean_ms = drift_sum / static_cast<double>(drift_n);
  if (prompt_n) r.prompt_mean_ms = prompt_sum / static_cast<double>(prompt_n);
  if (generate_n) r.generate_mean_ms = generate_sum / static_cast<double>(generate_n);
  return r;
}

namespace {

constexpr std::array<const char*, 16> kReportColumns = {
    "policy",         "events",        "evaluations", "trigger_count",
    "bootstrap_count", "trigger_rate", "precision",   "recall",
    "p50_ms",          "p75_ms",       "p90_ms",      "p95_ms",
    "drift_mean_ms",   "prompt_mean_ms", "generate_mean_ms", "generation_failures"};

ordered report_to_json(const MetricsReport& r) {
  ordered j;
  j["policy"] = r.policy;
  j["events"] = r.events;
  j["evaluations"] = r.evaluations;
  j["trigger_count"] = r.trigger_count;
  j["bootstrap_count"] = r.bootstrap_count;
  j["trigger_rate"] = r.trigger_rate;
  if (r.precision) j["precision"] = *r.precision;
  if (r.recall) j["recall"] = *r.recall;
  if (r.p50_ms) j["p50_ms"] = *r.p50_ms;
  if (r.p75_ms) j["p75_ms"] = *r.p75_ms;
  if (r.p90_ms) j["p90_ms"] = *r.p90_ms;
  if (r.p95_ms) j["p95_ms"] = *r.p95_ms;
  if (r.drift_mean_ms) j["drift_mean_ms"] = *r.drift_mean_ms;
  if (r.prompt_mean_ms) j["prompt_mean_ms"] = *r.prompt_mean_ms;
  if (r.generate_mean_ms) j["generate_mean_ms"] = *r.generate_mean_ms;
  j["generation_failures"] = r.generation_failures;
  return j;
}

// Renders a CSV cell exactly the way the JSON emitter would render the same
// value, so the two formats never disagree on a numeric digit.
std::string csv_cell(const ordered& j, const char* key) {
  if (!j.contains(key)) return "";
  const auto& v = j[key];
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

std::string report_to_json_text(const MetricsReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

std::string reports_to_csv_text(const std::vector<MetricsReport>& reports) {
  std::ostringstream out;
  for (std::size_t c = 0; c < kReportColumns.size(); ++c)
    out << (c ? "," : "") << kReportColumns[c];
  out << '\n';
  for (const auto& r : reports) {
    ordered j = report_to_json(r);
    for (std::size_t c = 0; c < kReportColumns.size(); ++c)
      out << (c ? "," : "") << csv_cell(j, kReportColumns[c]);
    out << '\n';
  }
  return out.str();
}

void emit_report(const std::vector<MetricsReport>& reports, ReportFormat format,
                 const std::string& path) {
  std::string text;
  if (format == ReportFormat::csv) {
    text = reports_to_csv_text(reports);
  } else if (reports.size() == 1) {
    text = report_to_json_text(reports.front());
  } else {
    ordered arr = ordered::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    text = arr.dump(2) + "\n";
  }
  if (path.empty())
    std::cout << text;
  else
    write_text_file(path, text);
}

ReplaySettings ReplaySettings::from_config(const Config& cfg) {
  ReplaySettings s;
  std::string clock = cfg.get_string("replay.clock", "simulated");
  if (clock == "simulated")
    s.clock = ClockMode::simulated;
  else if (clock == "wall")
    s.clock = ClockMode::wall;
  else
    fail(Errc::config, "replay.clock must be 'simulated' or 'wall', got '" + clock + "'");
  int64_t window = cfg.get_int("replay.match_window", static_cast<int64_t>(s.match_window));
  if (window < 0) fail(Errc::config, "replay.match_window must be >= 0");
  s.match_window = static_cast<std::size_t>(window);
  s.scenario_id = cfg.get_string("prompt.scenario_id", s.scenario_id);
  s.template_pool = cfg.get_string("prompt.template_pool", "");
  s.component_pool = cfg.get_string("prompt.component_pool", "");
  return s;
}

}  // namespace intentgate

// Command line front end: stream replay with pluggable trigger policies,
// synthetic stream generation, training corpus assembly, judge-response
// scoring, and a small percentile helper.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "intentgate/config.hpp"
#include "intentgate/corpus.hpp"
#include "intentgate/drift.hpp"
#include "intentgate/errors.hpp"
#include "intentgate/generation.hpp"
#include "intentgate/io.hpp"
#include "intentgate/judge.hpp"
#include "intentgate/prompt.hpp"
#include "intentgate/replay.hpp"

namespace {

using namespace intentgate;

Config load_config(const std::string& path) {
  return path.empty() ? Config() : Config::from_file(path);
}

void warn_unused(const Config& cfg) {
  for (const auto& key : cfg.unused_keys())
    std::cerr << "warning: unused config key '" << key << "'\n";
}

WindowPolicy window_from_config(const Config& cfg) {
  std::string kind = cfg.get_string("window.kind", "count");
  if (kind == "count")
    return WindowPolicy::by_count(
        static_cast<std::size_t>(cfg.get_int("window.count_n", 50)));
  if (kind == "time") return WindowPolicy::by_time(cfg.get_int("window.span_ms", 3'600'000));
  fail(Errc::config, "window.kind must be 'count' or 'time', got '" + kind + "'");
}

PipelineConfig pipeline_from_config(const Config& cfg, const ReplaySettings& settings) {
  PipelineConfig pc;
  pc.window = window_from_config(cfg);
  pc.out_of_order_tolerance_ms = cfg.get_int("replay.out_of_order_tolerance_ms", 5000);
  pc.feature = FeatureConfig::from_config(cfg);
  pc.scenario.scenario_id = settings.scenario_id;
  pc.clock = settings.clock;
  return pc;
}

PromptEngine engine_from_config(const Config& cfg, const ReplaySettings& settings) {
  PoolSet pools = load_pools(settings.template_pool, settings.component_pool);
  return PromptEngine(std::move(pools), std::make_shared<LinearScorer>(),
                      PromptEngineConfig::from_config(cfg), BudgetLimits::from_config(cfg),
                      CostConfig::from_config(cfg), FeatureConfig::from_config(cfg));
}

struct ReplayArgs {
  std::string sessions;
  std::vector<std::string> policies;
  std::string config;
  std::string catalog;
  std::string truth;
  std::string out;
  std::string format = "json";
  std::size_t jobs = 1;
  uint64_t seed = 0;  // reserved; the built-in generators are deterministic
};

int run_replay(const ReplayArgs& args) {
  Config cfg = load_config(args.config);
  ReplaySettings settings = ReplaySettings::from_config(cfg);
  DriftConfig drift_defaults = DriftConfig::from_config(cfg);

  std::vector<PolicySpec> policies;
  for (const auto& text : args.policies) policies.push_back(PolicySpec::parse(text, drift_defaults));

  TagCatalog catalog = load_tag_catalog(args.catalog);
  Sessions sessions = load_sessions(args.sessions);
  PromptEngine engine = engine_from_config(cfg, settings);
  std::unique_ptr<Generator> generator =
      make_generator(GeneratorConfig::from_config(cfg), catalog);
  PipelineConfig pc = pipeline_from_config(cfg, settings);

  std::optional<GroundTruth> truth;
  if (!args.truth.empty()) truth = load_ground_truth(args.truth);

  warn_unused(cfg);

  std::vector<MetricsReport> reports;
  for (const auto& policy : policies) {
    auto traces = replay_sessions(sessions, policy, engine, *generator, catalog, pc, args.jobs);
    reports.push_back(MetricsReport::compute(traces, truth, settings.match_window));
  }
  emit_report(reports, args.format == "csv" ? ReportFormat::csv : ReportFormat::json, args.out);
  return 0;
}

struct SynthArgs {
  std::string spec;
  std::string out;
  std::string catalog;
  std::optional<uint64_t> seed;
};

void save_catalog_tsv(const TagCatalog& catalog, const std::string& path) {
  std::ostringstream out;
  for (const auto& [item, tag] : catalog.items()) out << item << '\t' << tag << '\n';
  write_text_file(path, out.str());
}

int run_synth(const SynthArgs& args) {
  SyntheticStreamSpec spec = SyntheticStreamSpec::from_json_file(args.spec);
  if (args.seed) spec.seed = *args.seed;

  TagCatalog catalog;
  if (args.catalog.empty()) {
    catalog = synthetic_catalog(spec);
    save_catalog_tsv(catalog, args.out + ".catalog.tsv");
  } else {
    catalog = load_tag_catalog(args.catalog);
  }

  auto [events, shifts] = synth_sessions(spec, catalog);
  Sessions sessions;
  sessions[spec.user] = std::move(events);
  dump_sessions(sessions, args.out);
  save_ground_truth({{spec.user, shifts}}, args.out + ".truth.json");
  return 0;
}

struct CorpusArgs {
  std::string config;
  std::string out;
};

int run_corpus_build(const CorpusArgs& args) {
  Config cfg = load_config(args.config);

  std::string purchase_log_path = cfg.get_string("corpus.purchase_log", "");
  std::string search_log_path = cfg.get_string("corpus.search_log", "");
  std::string catalog_path = cfg.get_string("corpus.catalog", "");
  std::string matrix_path = cfg.get_string("corpus.copurchase_matrix", "");
  std::string human_path = cfg.get_string("corpus.human_samples", "");
  if (purchase_log_path.empty() || search_log_path.empty() || catalog_path.empty())
    fail(Errc::config,
         "corpus build needs corpus.purchase_log, corpus.search_log and corpus.catalog");

  int64_t link_window_ms = cfg.get_int("corpus.link_window_ms", 3'600'000);
  auto behavior_cap = static_cast<std::size_t>(cfg.get_int("corpus.behavior_cap", 50));
  auto top_k = static_cast<std::size_t>(cfg.get_int("corpus.top_k", 5));

  MixConfig mix_cfg;
  mix_cfg.ratio_behavior_driven = cfg.get_double("corpus.ratio_behavior_driven", 0.60);
  mix_cfg.ratio_co_purchase = cfg.get_double("corpus.ratio_co_purchase", 0.20);
  mix_cfg.ratio_llm_rewrite = cfg.get_double("corpus.ratio_llm_rewrite", 0.15);
  mix_cfg.ratio_human = cfg.get_double("corpus.ratio_human", 0.05);
  int64_t total = cfg.get_int("corpus.total_size", 0);
  if (total <= 0) fail(Errc::config, "corpus.total_size must be a positive integer");
  mix_cfg.total_size = static_cast<std::size_t>(total);
  auto seed = static_cast<uint64_t>(cfg.get_int("corpus.seed", 0));

  warn_unused(cfg);

  Sessions purchase_log = load_sessions(purchase_log_path);
  SearchLog search_log = load_search_log(search_log_path);
  TagCatalog catalog = load_tag_catalog(catalog_path);

  std::map<SampleSource, std::vector<TrainingSample>> pools;
  pools[SampleSource::behavior_driven] =
      build_behavior_driven(purchase_log, search_log, link_window_ms, behavior_cap);

  if (!matrix_path.empty()) {
    CoPurchaseMatrix matrix = load_co_purchase_matrix(matrix_path);
    std::vector<BehaviorEvent> seeds;
    for (const auto& [_, events] : purchase_log)
      seeds.insert(seeds.end(), events.begin(), events.end());
    pools[SampleSource::co_purchase] = build_co_purchase(matrix, catalog, seeds, top_k);
  }

  pools[SampleSource::llm_rewrite] = augment_rewrite(pools[SampleSource::behavior_driven]);
  if (!human_path.empty()) pools[SampleSource::human] = ingest_human(human_path);

  std::vector<TrainingSample> mixed = mix(pools, mix_cfg, seed);
  save_samples_jsonl(mixed, args.out);
  return 0;
}

struct JudgeArgs {
  std::string samples;
  std::string config;
  std::string out;
};

// Input: JSONL lines {"id": "...", "response": "..."} where response is the
// raw judge output. Output: one line per input with the parsed scores and the
// weighted aggregate.
int run_judge_score(const JudgeArgs& args) {
  Config cfg = load_config(args.config);
  JudgeWeights weights = JudgeWeights::from_config(cfg);
  warn_unused(cfg);

  std::ifstream in(args.samples);
  if (!in) fail(Errc::io, "cannot open '" + args.samples + "' for reading");

  std::ostringstream out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string where = args.samples + ":" + std::to_string(line_no);
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("response") ||
        !j["response"].is_string())
      fail(Errc::data, where + ": expected an object with a string 'response'");
    JudgeScores scores = parse_scores(j["response"].get<std::string>());
    nlohmann::ordered_json row;
    row["id"] = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>()
                                                        : "line-" + std::to_string(line_no);
    row["sem"] = scores.sem;
    row["logic"] = scores.logic;
    row["style"] = scores.style;
    row["score"] = aggregate(scores, weights);
    out << row.dump() << '\n';
  }
  if (args.out.empty())
    std::cout << out.str();
  else
    write_text_file(args.out, out.str());
  return 0;
}

struct PercentileArgs {
  std::string in;
  std::vector<int> ranks = {50, 75, 90, 95};
};

int run_percentiles(const PercentileArgs& args) {
  std::istringstream values(read_text_file(args.in));
  std::vector<double> latencies;
  double v = 0.0;
  while (values >> v) latencies.push_back(v);
  auto out = compute_percentiles(latencies, args.ranks);
  for (std::size_t i = 0; i < args.ranks.size(); ++i)
    std::cout << "P" << args.ranks[i] << " " << nlohmann::json(out[i]).dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drift-gated prompt pipeline for next-query generation"};
  app.require_subcommand(1);

  ReplayArgs replay_args;
  auto* replay_cmd =
      app.add_subcommand("replay", "Replay behavior logs under one or more trigger policies");
  replay_cmd->add_option("--sessions", replay_args.sessions, "Behavior log (JSONL)")->required();
  replay_cmd
      ->add_option("--policy", replay_args.policies,
                   "Trigger policy: always | every-k=K | drift (repeatable)")
      ->required()
      ->delimiter(',');
  replay_cmd->add_option("--config", replay_args.config, "Config file (.json or .toml)");
  replay_cmd->add_option("--catalog", replay_args.catalog, "Item-to-tag catalog (TSV)")
      ->required();
  replay_cmd->add_option("--truth", replay_args.truth,
                         "Ground-truth shift indices (JSON), enables precision/recall");
  replay_cmd->add_option("--out", replay_args.out, "Report path (default: stdout)");
  replay_cmd->add_option("--format", replay_args.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  replay_cmd->add_option("--jobs", replay_args.jobs, "Worker threads across sessions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  replay_cmd->add_option("--seed", replay_args.seed,
                         "Reserved for stochastic backends; built-in generators ignore it");
  replay_cmd->callback([&] { run_replay(replay_args); });

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate a synthetic behavior stream with known shift points");
  synth_cmd->add_option("--spec", synth_args.spec, "Stream spec (JSON)")->required();
  synth_cmd->add_option("--out", synth_args.out, "Output behavior log (JSONL)")->required();
  synth_cmd->add_option("--catalog", synth_args.catalog,
                        "Existing catalog (TSV); omit to fabricate one next to --out");
  uint64_t seed_value = 0;
  auto* seed_opt = synth_cmd->add_option("--seed", seed_value, "Override the spec's seed");
  synth_cmd->callback([&] {
    if (*seed_opt) synth_args.seed = seed_value;
    run_synth(synth_args);
  });

  auto* corpus_cmd = app.add_subcommand("corpus", "Training corpus operations");
  corpus_cmd->require_subcommand(1);
  CorpusArgs corpus_args;
  auto* corpus_build = corpus_cmd->add_subcommand(
      "build", "Assemble a mixed training corpus from the configured sources");
  corpus_build->add_option("--config", corpus_args.config, "Config file with corpus.* keys")
      ->required();
  corpus_build->add_option("--out", corpus_args.out, "Output samples (JSONL)")->required();
  corpus_build->callback([&] { run_corpus_build(corpus_args); });

  auto* judge_cmd = app.add_subcommand("judge", "Quality judging operations");
  judge_cmd->require_subcommand(1);
  JudgeArgs judge_args;
  auto* judge_score =
      judge_cmd->add_subcommand("score", "Parse raw judge responses and aggregate scores");
  judge_score->add_option("--samples", judge_args.samples, "Judge responses (JSONL)")->required();
  judge_score->add_option("--config", judge_args.config, "Config file with judge.* weights");
  judge_score->add_option("--out", judge_args.out, "Output scores (JSONL, default: stdout)");
  judge_score->callback([&] { run_judge_score(judge_args); });

  PercentileArgs pct_args;
  auto* pct_cmd =
      app.add_subcommand("percentiles", "Nearest-rank percentiles of a list of numbers");
  pct_cmd->add_option("--in", pct_args.in, "Whitespace-separated numbers")->required();
  pct_cmd->add_option("--ranks", pct_args.ranks, "Ranks in (0,100]")
      ->delimiter(',')
      ->capture_default_str();
  pct_cmd->callback([&] { run_percentiles(pct_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const intentgate::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return intentgate::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

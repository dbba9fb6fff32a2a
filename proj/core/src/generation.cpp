#include "intentgate/generation.hpp"

#include <chrono>
#include <regex>
#include <semaphore>

#include <httplib.h>
#include <json.hpp>

#include "intentgate/config.hpp"
#include "intentgate/io.hpp"
#include "intentgate/tokenizer.hpp"

namespace intentgate {

namespace {

constexpr std::size_t kMaxQueryTokens = 64;

// First non-empty line, trimmed, capped at 64 tokens. Empty output is a
// generation failure rather than a silently blank query.
std::string normalize_query(const std::string& raw) {
  std::size_t begin = 0;
  while (begin < raw.size()) {
    std::size_t end = raw.find('\n', begin);
    if (end == std::string::npos) end = raw.size();
    std::string line = raw.substr(begin, end - begin);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
      line.pop_back();
    std::size_t lead = line.find_first_not_of(" \t");
    if (lead != std::string::npos) {
      line.erase(0, lead);
      return truncate_to_tokens(line, kMaxQueryTokens);
    }
    begin = end + 1;
  }
  return {};
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

MockGenerator::MockGenerator(TagCatalog catalog, std::map<std::string, std::string> complement_table)
    : catalog_(std::move(catalog)), complement_(std::move(complement_table)) {}

GeneratedQuery MockGenerator::generate(const std::string& prompt_text) const {
  if (prompt_text.empty()) fail(Errc::generation_failed, "mock generator got an empty prompt");

  // Recover the rendered "(item, action, time)" triples.
  static const std::regex triple(R"(\(([^,()]+), (click|cart|favorite|purchase), ([^()]+)\))");
  std::map<std::string, std::size_t> tag_counts;
  for (auto it = std::sregex_iterator(prompt_text.begin(), prompt_text.end(), triple);
       it != std::sregex_iterator(); ++it)
    tag_counts[catalog_.tag_of((*it)[1].str())] += 1;

  std::string dominant = TagCatalog::kUnknownTag;
  std::size_t best = 0;
  for (const auto& [tag, count] : tag_counts) {
    if (count > best) {  // map order makes ties go to the smaller tag
      best = count;
      dominant = tag;
    }
  }

  auto hit = complement_.find(dominant);
  std::string text = normalize_query(hit == complement_.end() ? dominant : hit->second);
  if (text.empty()) fail(Errc::generation_failed, "mock generator produced an empty query");

  GeneratedQuery q;
  q.text = std::move(text);
  q.latency_ms = 0.0;  // lookup cost is negligible; keeps replay byte-stable
  q.source = GeneratedQuery::Source::mock;
  return q;
}

void GeneratorConfig::validate() const {
  if (timeout_ms <= 0) fail(Errc::config, "generator.timeout_ms must be > 0");
  if (max_retries < 0) fail(Errc::config, "generator.max_retries must be >= 0");
  if (max_in_flight < 1) fail(Errc::config, "generator.max_in_flight must be >= 1");
  if (kind == Kind::remote) {
    if (endpoint.empty()) fail(Errc::config, "generator.endpoint is required for kind=remote");
    if (endpoint.rfind("http://", 0) != 0)
      fail(Errc::config, "generator.endpoint must start with http:// (TLS is not built in)");
  }
}

GeneratorConfig GeneratorConfig::from_config(const Config& cfg) {
  GeneratorConfig g;
  std::string kind = cfg.get_string("generator.kind", "mock");
  if (kind == "mock")
    g.kind = Kind::mock;
  else if (kind == "remote")
    g.kind = Kind::remote;
  else
    fail(Errc::config, "generator.kind must be 'mock' or 'remote', got '" + kind + "'");
  g.complement_table_path = cfg.get_string("generator.complement_table", "");
  g.endpoint = cfg.get_string("generator.endpoint", "");
  g.timeout_ms = cfg.get_int("generator.timeout_ms", g.timeout_ms);
  g.max_retries = static_cast<int>(cfg.get_int("generator.max_retries", g.max_retries));
  g.max_in_flight = static_cast<int>(cfg.get_int("generator.max_in_flight", g.max_in_flight));
  g.validate();
  return g;
}

struct RemoteGenerator::Impl {
  std::string base;  // http://host[:port]
  std::string path;  // /generate or whatever the endpoint carries
  int64_t timeout_ms;
  int max_retries;
  mutable std::counting_semaphore<> slots;

  explicit Impl(const GeneratorConfig& cfg)
      : timeout_ms(cfg.timeout_ms),
        max_retries(cfg.max_retries),
        slots(cfg.max_in_flight) {
    const std::string prefix = "http://";
    std::size_t host_begin = prefix.size();
    std::size_t slash = cfg.endpoint.find('/', host_begin);
    if (slash == std::string::npos) {
      base = cfg.endpoint;
      path = "/";
    } else {
      base = cfg.endpoint.substr(0, slash);
      path = cfg.endpoint.substr(slash);
    }
  }
};

RemoteGenerator::RemoteGenerator(const GeneratorConfig& cfg) {
  GeneratorConfig checked = cfg;
  checked.kind = GeneratorConfig::Kind::remote;
  checked.validate();
  impl_ = std::make_unique<Impl>(checked);
}

RemoteGenerator::~RemoteGenerator() = default;

GeneratedQuery RemoteGenerator::generate(const std::string& prompt_text) const {
  impl_->slots.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{impl_->slots};

  auto start = std::chrono::steady_clock::now();
  std::string last_error = "no attempt made";
  const std::string body = nlohmann::json{{"prompt", prompt_text}}.dump();

  for (int attempt = 0; attempt <= impl_->max_retries; ++attempt) {
    httplib::Client client(impl_->base);
    client.set_connection_timeout(std::chrono::milliseconds(impl_->timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(impl_->timeout_ms));
    client.set_write_timeout(std::chrono::milliseconds(impl_->timeout_ms));

    auto res = client.Post(impl_->path, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "http status " + std::to_string(res->status);
      continue;
    }
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("query") || !j["query"].is_string()) {
      last_error = "response is not a {\"query\": ...} object";
      continue;
    }
    std::string text = normalize_query(j["query"].get<std::string>());
    if (text.empty()) {
      last_error = "response query is empty";
      continue;
    }
    GeneratedQuery q;
    q.text = std::move(text);
    q.latency_ms = elapsed_ms(start);
    q.source = GeneratedQuery::Source::remote;
    return q;
  }
  fail(Errc::generation_failed, "remote generation failed after " +
                                    std::to_string(impl_->max_retries + 1) +
                                    " attempt(s): " + last_error);
}

std::unique_ptr<Generator> make_generator(const GeneratorConfig& cfg, const TagCatalog& catalog) {
  cfg.validate();
  if (cfg.kind == GeneratorConfig::Kind::remote) return std::make_unique<RemoteGenerator>(cfg);
  std::map<std::string, std::string> complement;
  if (!cfg.complement_table_path.empty())
    complement = load_complement_table(cfg.complement_table_path);
  return std::make_unique<MockGenerator>(catalog, std::move(complement));
}

}  // namespace intentgate

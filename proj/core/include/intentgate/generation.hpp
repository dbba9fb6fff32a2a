#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "intentgate/behavior.hpp"

namespace intentgate {

class Config;

struct GeneratedQuery {
  std::string text;  // non-empty, single line, at most 64 tokens
  double latency_ms = 0.0;
  enum class Source { mock, remote } source = Source::mock;
};

class Generator {
 public:
  virtual ~Generator() = default;
  virtual GeneratedQuery generate(const std::string& prompt_text) const = 0;
};

// Offline stand-in: recovers the rendered behavior triples from the prompt
// text, maps items to tags, and answers with the complement-table entry for
// the dominant tag (falling back to the tag itself). Pure function of its
// inputs, so replay stays deterministic.
class MockGenerator final : public Generator {
 public:
  MockGenerator(TagCatalog catalog, std::map<std::string, std::string> complement_table);
  GeneratedQuery generate(const std::string& prompt_text) const override;

 private:
  TagCatalog catalog_;
  std::map<std::string, std::string> complement_;
};

struct GeneratorConfig {
  enum class Kind { mock, remote };
  Kind kind = Kind::mock;
  std::string complement_table_path;  // mock only, optional
  std::string endpoint;               // remote only, http://host[:port][/path]
  int64_t timeout_ms = 2000;
  int max_retries = 1;
  int max_in_flight = 4;

  void validate() const;
  static GeneratorConfig from_config(const Config& cfg);
};

// POSTs {"prompt": ...} and expects {"query": ...}. Retries up to
// max_retries times, then reports the backend unavailable. At most
// max_in_flight requests run concurrently.
class RemoteGenerator final : public Generator {
 public:
  explicit RemoteGenerator(const GeneratorConfig& cfg);
  ~RemoteGenerator() override;
  GeneratedQuery generate(const std::string& prompt_text) const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::unique_ptr<Generator> make_generator(const GeneratorConfig& cfg, const TagCatalog& catalog);

}  // namespace intentgate

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace intentgate {

// Flat dotted-key configuration ("drift.tau = 0.8"). Two on-disk formats:
// JSON (flat dotted keys or nested objects, which are flattened) and a TOML
// subset (one "key = value" per line, # comments, no tables). Accessed keys
// are tracked so callers can warn about typos.
class Config {
 public:
  using Value = std::variant<bool, int64_t, double, std::string>;

  Config() = default;

  static Config from_file(const std::string& path);  // dispatches on extension
  static Config from_json_text(const std::string& text, const std::string& origin = "<json>");
  static Config from_toml_text(const std::string& text, const std::string& origin = "<toml>");

  bool has(const std::string& key) const;
  void set(const std::string& key, Value v);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  std::vector<std::string> keys() const;
  std::vector<std::string> unused_keys() const;  // present but never read

 private:
  const Value* find(const std::string& key) const;

  std::map<std::string, Value> values_;
  mutable std::set<std::string> accessed_;
};

}  // namespace intentgate

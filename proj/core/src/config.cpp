#include "intentgate/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "intentgate/errors.hpp"

namespace intentgate {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  for (char c : key) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

void flatten_json(const nlohmann::json& j, const std::string& prefix,
                  std::map<std::string, Config::Value>& out, const std::string& origin) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items())
      flatten_json(v, prefix.empty() ? k : prefix + "." + k, out, origin);
    return;
  }
  if (prefix.empty()) fail(Errc::config, origin + ": top level must be an object");
  if (j.is_boolean())
    out[prefix] = j.get<bool>();
  else if (j.is_number_integer() || j.is_number_unsigned())
    out[prefix] = j.get<int64_t>();
  else if (j.is_number_float())
    out[prefix] = j.get<double>();
  else if (j.is_string())
    out[prefix] = j.get<std::string>();
  else
    fail(Errc::config, origin + ": key '" + prefix + "' has an unsupported value type");
}

Config::Value parse_toml_scalar(const std::string& raw, const std::string& where) {
  if (raw.empty()) fail(Errc::config, where + ": missing value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"')
      fail(Errc::config, where + ": unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
      char c = raw[i];
      if (c == '\\' && i + 2 < raw.size()) {
        char n = raw[++i];
        switch (n) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(Errc::config, where + ": unsupported escape \\" + std::string(1, n));
        }
      } else if (c == '"') {
        fail(Errc::config, where + ": stray quote inside string");
      } else {
        out += c;
      }
    }
    return out;
  }
  if (raw == "true") return true;
  if (raw == "false") return false;

  // Integer if it looks like one, double otherwise.
  bool integral = !raw.empty();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (i == 0 && (c == '+' || c == '-')) continue;
    if (c < '0' || c > '9') {
      integral = false;
      break;
    }
  }
  try {
    std::size_t used = 0;
    if (integral) {
      int64_t v = std::stoll(raw, &used);
      if (used == raw.size()) return v;
    } else {
      double v = std::stod(raw, &used);
      if (used == raw.size()) return v;
    }
  } catch (const std::exception&) {
  }
  fail(Errc::config, where + ": cannot parse value '" + raw + "'");
}

// Strips a # comment, respecting quoted strings.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (c == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0)
    return from_json_text(buf.str(), path);
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0)
    return from_toml_text(buf.str(), path);
  fail(Errc::config, "config file '" + path + "' must end in .json or .toml");
}

Config Config::from_json_text(const std::string& text, const std::string& origin) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(Errc::config, origin + ": invalid JSON");
  if (!j.is_object()) fail(Errc::config, origin + ": top level must be an object");
  Config cfg;
  flatten_json(j, "", cfg.values_, origin);
  for (const auto& [k, _] : cfg.values_)
    if (!valid_key(k)) fail(Errc::config, origin + ": invalid key '" + k + "'");
  return cfg;
}

Config Config::from_toml_text(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string where = origin + ":" + std::to_string(line_no);
    std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[')
      fail(Errc::config, where + ": tables are not supported; use flat dotted keys");
    std::size_t eq = body.find('=');
    if (eq == std::string::npos) fail(Errc::config, where + ": expected key = value");
    std::string key = trim(body.substr(0, eq));
    if (!valid_key(key)) fail(Errc::config, where + ": invalid key '" + key + "'");
    if (cfg.values_.count(key)) fail(Errc::config, where + ": duplicate key '" + key + "'");
    cfg.values_[key] = parse_toml_scalar(trim(body.substr(eq + 1)), where);
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

void Config::set(const std::string& key, Value v) {
  if (!valid_key(key)) fail(Errc::config, "invalid config key '" + key + "'");
  values_[key] = std::move(v);
}

const Config::Value* Config::find(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  accessed_.insert(key);
  return &it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (const auto* s = std::get_if<std::string>(v)) return *s;
  fail(Errc::config, "config key '" + key + "' must be a string");
}

int64_t Config::get_int(const std::string& key, int64_t fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (const auto* i = std::get_if<int64_t>(v)) return *i;
  if (const auto* d = std::get_if<double>(v)) {
    if (*d == std::floor(*d)) return static_cast<int64_t>(*d);
    fail(Errc::config, "config key '" + key + "' must be an integer");
  }
  fail(Errc::config, "config key '" + key + "' must be an integer");
}

double Config::get_double(const std::string& key, double fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (const auto* d = std::get_if<double>(v)) return *d;
  if (const auto* i = std::get_if<int64_t>(v)) return static_cast<double>(*i);
  fail(Errc::config, "config key '" + key + "' must be a number");
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (const auto* b = std::get_if<bool>(v)) return *b;
  fail(Errc::config, "config key '" + key + "' must be a boolean");
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [k, _] : values_) out.push_back(k);
  return out;
}

std::vector<std::string> Config::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : values_)
    if (!accessed_.count(k)) out.push_back(k);
  return out;
}

}  // namespace intentgate

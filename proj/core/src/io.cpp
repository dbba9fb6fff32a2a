#include "intentgate/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "intentgate/errors.hpp"
#include "intentgate/prompt.hpp"

namespace intentgate {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

std::string at(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line);
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io, "cannot open '" + path + "' for writing");
  return out;
}

json parse_line(const std::string& line, const std::string& where) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    fail(Errc::data, where + ": expected a JSON object");
  return j;
}

std::string need_string(const json& j, const char* field, const std::string& where) {
  if (!j.contains(field) || !j[field].is_string() || j[field].get<std::string>().empty())
    fail(Errc::data, where + ": missing or empty string field '" + std::string(field) + "'");
  return j[field].get<std::string>();
}

int64_t need_ts(const json& j, const char* field, const std::string& where) {
  if (!j.contains(field) || !j[field].is_number_integer())
    fail(Errc::data, where + ": missing integer field '" + std::string(field) + "'");
  int64_t ts = j[field].get<int64_t>();
  if (ts < 0) fail(Errc::data, where + ": negative timestamp");
  return ts;
}

BehaviorEvent event_from_json(const json& j, const std::string& where) {
  BehaviorEvent e;
  e.item_id = need_string(j, "item", where);
  std::string action = need_string(j, "action", where);
  auto a = action_from_string(action);
  if (!a) fail(Errc::data, where + ": unknown action '" + action + "'");
  e.action = *a;
  e.timestamp = need_ts(j, "ts", where);
  return e;
}

ordered event_to_json(const BehaviorEvent& e) {
  ordered j;
  j["item"] = e.item_id;
  j["action"] = to_string(e.action);
  j["ts"] = e.timestamp;
  return j;
}

// Splits a line into exactly n tab-separated fields, tolerating a trailing \r.
std::vector<std::string> tsv_fields(std::string line, std::size_t n, const std::string& where) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  if (out.size() != n)
    fail(Errc::data, where + ": expected " + std::to_string(n) + " tab-separated fields, got " +
                         std::to_string(out.size()));
  for (const auto& f : out)
    if (f.empty()) fail(Errc::data, where + ": empty field");
  return out;
}

double parse_weight(const std::string& raw, const std::string& where) {
  try {
    std::size_t used = 0;
    double w = std::stod(raw, &used);
    if (used == raw.size()) return w;
  } catch (const std::exception&) {
  }
  fail(Errc::data, where + ": cannot parse weight '" + raw + "'");
}

// Applies fn to every non-blank line, passing "path:line" for error context.
template <typename Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  std::ifstream in = open_for_read(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(line, at(path, line_no));
  }
}

}  // namespace

Sessions load_sessions(const std::string& path) {
  Sessions sessions;
  for_each_line(path, [&](const std::string& line, const std::string& where) {
    json j = parse_line(line, where);
    std::string user = need_string(j, "user", where);
    sessions[user].push_back(event_from_json(j, where));
  });
  for (auto& [_, events] : sessions)
    std::stable_sort(events.begin(), events.end(),
                     [](const BehaviorEvent& a, const BehaviorEvent& b) {
                       return a.timestamp < b.timestamp;
                     });
  return sessions;
}

void dump_sessions(const Sessions& sessions, const std::string& path) {
  std::ofstream out = open_for_write(path);
  for (const auto& [user, events] : sessions) {
    for (const auto& e : events) {
      ordered j;
      j["user"] = user;
      j["item"] = e.item_id;
      j["action"] = to_string(e.action);
      j["ts"] = e.timestamp;
      out << j.dump() << '\n';
    }
  }
  if (!out) fail(Errc::io, "write to '" + path + "' failed");
}

TagCatalog load_tag_catalog(const std::string& path) {
  std::map<std::string, std::string> item_to_tag;
  for_each_line(path, [&](const std::string& line, const std::string& where) {
    auto f = tsv_fields(line, 2, where);
    if (!item_to_tag.emplace(f[0], f[1]).second)
      fail(Errc::data, where + ": duplicate item '" + f[0] + "'");
  });
  if (item_to_tag.empty()) fail(Errc::data, path + ": catalog is empty");
  return TagCatalog(std::move(item_to_tag));
}

std::map<std::string, std::string> load_complement_table(const std::string& path) {
  std::map<std::string, std::string> table;
  for_each_line(path, [&](const std::string& line, const std::string& where) {
    auto f = tsv_fields(line, 2, where);
    if (!table.emplace(f[0], f[1]).second)
      fail(Errc::data, where + ": duplicate tag '" + f[0] + "'");
  });
  return table;
}

CoPurchaseMatrix load_co_purchase_matrix(const std::string& path) {
  CoPurchaseMatrix matrix;
  for_each_line(path, [&](const std::string& line, const std::string& where) {
    auto f = tsv_fields(line, 3, where);
    matrix.rows[f[0]].emplace_back(f[1], parse_weight(f[2], where));
  });
  for (auto& [_, row] : matrix.rows)
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
  matrix.validate();
  return matrix;
}

SearchLog load_search_log(const std::string& path) {
  SearchLog log;
  for_each_line(path, [&](const std::string& line, const std::string& where) {
    json j = parse_line(line, where);
    SearchRecord r;
    r.user = need_string(j, "user", where);
    r.ts = need_ts(j, "ts", where);
    r.query = need_string(j, "query", where);
    log[r.user].push_back(std::move(r));
  });
  for (auto& [_, records] : log)
    std::stable_sort(records.begin(), records.end(),
                     [](const SearchRecord& a, const SearchRecord& b) { return a.ts < b.ts; });
  return log;
}

std::vector<TrainingSample> load_samples_jsonl(const std::string& path) {
  std::vector<TrainingSample> samples;
  for_each_line(path, [&](const std::string& line, const std::string& where) {
    json j = parse_line(line, where);
    TrainingSample s;
    if (!j.contains("behavior") || !j["behavior"].is_array() || j["behavior"].empty())
      fail(Errc::data, where + ": missing or empty array field 'behavior'");
    for (const auto& ev : j["behavior"]) {
      if (!ev.is_object()) fail(Errc::data, where + ": behavior entries must be objects");
      s.behavior.push_back(event_from_json(ev, where));
    }
    s.target_query = need_string(j, "target_query", where);
    s.ref_time = need_ts(j, "ref_time", where);
    if (j.contains("source")) {
      std::string source = need_string(j, "source", where);
      auto parsed = sample_source_from_string(source);
      if (!parsed) fail(Errc::data, where + ": unknown source '" + source + "'");
      s.source = *parsed;
    } else {
      s.source = SampleSource::human;
    }
    try {
      s.validate();
    } catch (const Error& e) {
      fail(Errc::data, where + ": " + e.what());
    }
    samples.push_back(std::move(s));
  });
  return samples;
}

void save_samples_jsonl(const std::vector<TrainingSample>& samples, const std::string& path) {
  std::ofstream out = open_for_write(path);
  for (const auto& s : samples) {
    ordered j;
    j["behavior"] = ordered::array();
    for (const auto& e : s.behavior) j["behavior"].push_back(event_to_json(e));
    j["target_query"] = s.target_query;
    j["source"] = to_string(s.source);
    j["ref_time"] = s.ref_time;
    out << j.dump() << '\n';
  }
  if (!out) fail(Errc::io, "write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_for_write(path);
  out << content;
  if (!out) fail(Errc::io, "write to '" + path + "' failed");
}

namespace {

std::vector<double> affinity_from_json(const json& j, const std::string& where) {
  std::vector<double> out;
  if (!j.contains("affinity")) return out;
  if (!j["affinity"].is_array())
    fail(Errc::data, where + ": 'affinity' must be an array of numbers");
  for (const auto& v : j["affinity"]) {
    if (!v.is_number()) fail(Errc::data, where + ": 'affinity' must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

json parse_pool_file(const std::string& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_array())
    fail(Errc::data, path + ": expected a JSON array");
  return j;
}

}  // namespace

PoolSet load_pools(const std::string& template_pool_path,
                   const std::string& component_pool_path) {
  PoolSet pools;
  if (template_pool_path.empty()) {
    pools.templates = default_pools().templates;
  } else {
    for (const auto& j : parse_pool_file(template_pool_path)) {
      if (!j.is_object())
        fail(Errc::data, template_pool_path + ": entries must be objects");
      PromptTemplate t;
      t.id = need_string(j, "id", template_pool_path);
      t.body = need_string(j, "body", template_pool_path);
      if (j.contains("scenario_ids")) {
        if (!j["scenario_ids"].is_array())
          fail(Errc::data, template_pool_path + ": 'scenario_ids' must be an array");
        for (const auto& s : j["scenario_ids"]) {
          if (!s.is_string() || s.get<std::string>().empty())
            fail(Errc::data, template_pool_path + ": scenario ids must be non-empty strings");
          t.scenario_ids.push_back(s.get<std::string>());
        }
      }
      t.affinity = affinity_from_json(j, template_pool_path);
      pools.templates.push_back(std::move(t));
    }
  }
  if (!component_pool_path.empty()) {
    for (const auto& j : parse_pool_file(component_pool_path)) {
      if (!j.is_object())
        fail(Errc::data, component_pool_path + ": entries must be objects");
      PromptComponent c;
      c.id = need_string(j, "id", component_pool_path);
      c.text = need_string(j, "text", component_pool_path);
      c.affinity = affinity_from_json(j, component_pool_path);
      if (j.contains("token_cost")) {
        if (!j["token_cost"].is_number_unsigned())
          fail(Errc::data, component_pool_path + ": 'token_cost' must be a non-negative integer");
        c.token_cost = j["token_cost"].get<std::size_t>();
      }
      pools.components.push_back(std::move(c));
    }
  }
  pools.validate_and_finalize();
  return pools;
}

}  // namespace intentgate

#pragma once

#include <map>
#include <string>
#include <vector>

#include "intentgate/behavior.hpp"
#include "intentgate/corpus.hpp"

namespace intentgate {

// Session logs are JSONL: {"user":"u1","item":"i42","action":"click","ts":...}
// Malformed lines are errors carrying "path:line".
Sessions load_sessions(const std::string& path);
void dump_sessions(const Sessions& sessions, const std::string& path);

// TSV item<TAB>tag, one mapping per line.
TagCatalog load_tag_catalog(const std::string& path);

// TSV tag<TAB>query.
std::map<std::string, std::string> load_complement_table(const std::string& path);

// TSV item<TAB>co_item<TAB>weight; rows come out sorted by descending weight.
CoPurchaseMatrix load_co_purchase_matrix(const std::string& path);

// JSONL like the session log plus a "query" field: {"user":"u1","ts":...,"query":"..."}.
SearchLog load_search_log(const std::string& path);

std::vector<TrainingSample> load_samples_jsonl(const std::string& path);
void save_samples_jsonl(const std::vector<TrainingSample>& samples, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace intentgate

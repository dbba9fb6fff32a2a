#include "intentgate/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace intentgate {

const char* to_string(ActionType a) {
  switch (a) {
    case ActionType::click: return "click";
    case ActionType::cart: return "cart";
    case ActionType::favorite: return "favorite";
    case ActionType::purchase: return "purchase";
  }
  return "click";
}

std::optional<ActionType> action_from_string(std::string_view s) {
  if (s == "click") return ActionType::click;
  if (s == "cart") return ActionType::cart;
  if (s == "favorite") return ActionType::favorite;
  if (s == "purchase") return ActionType::purchase;
  return std::nullopt;
}

WindowPolicy WindowPolicy::by_count(std::size_t n) {
  WindowPolicy p;
  p.kind = Kind::count;
  p.count_n = n;
  p.validate();
  return p;
}

WindowPolicy WindowPolicy::by_time(int64_t span_ms) {
  WindowPolicy p;
  p.kind = Kind::time;
  p.span_ms = span_ms;
  p.validate();
  return p;
}

void WindowPolicy::validate() const {
  if (kind == Kind::count && count_n == 0)
    fail(Errc::config, "window count policy requires count_n >= 1");
  if (kind == Kind::time && span_ms <= 0)
    fail(Errc::config, "window time policy requires span_ms > 0");
}

int64_t BehaviorWindow::newest_ts() const {
  if (events.empty()) fail(Errc::empty_window, "newest_ts on empty window");
  return events.back().timestamp;
}

int64_t BehaviorWindow::oldest_ts() const {
  if (events.empty()) fail(Errc::empty_window, "oldest_ts on empty window");
  return events.front().timestamp;
}

EventStore::EventStore(WindowPolicy policy, int64_t out_of_order_tolerance_ms)
    : policy_(policy), tolerance_ms_(out_of_order_tolerance_ms) {
  policy_.validate();
  if (tolerance_ms_ < 0) fail(Errc::config, "out-of-order tolerance must be >= 0");
}

void EventStore::append(const BehaviorEvent& e) {
  if (e.item_id.empty()) fail(Errc::data, "event item_id must be non-empty");
  if (e.timestamp < 0) fail(Errc::data, "event timestamp must be >= 0");
  if (!events_.empty()) {
    int64_t newest = events_.back().timestamp;
    if (e.timestamp < newest - tolerance_ms_)
      fail(Errc::out_of_order_event,
           "event at " + std::to_string(e.timestamp) + " is older than newest " +
               std::to_string(newest) + " minus tolerance " + std::to_string(tolerance_ms_));
  }
  // Insert after any equal timestamps: stable for same-ts arrivals.
  auto pos = std::upper_bound(
      events_.begin(), events_.end(), e.timestamp,
      [](int64_t ts, const BehaviorEvent& ev) { return ts < ev.timestamp; });
  events_.insert(pos, e);
  trim();
}

void EventStore::trim() {
  if (events_.empty()) return;
  if (policy_.kind == WindowPolicy::Kind::count) {
    if (events_.size() > policy_.count_n)
      events_.erase(events_.begin(),
                    events_.begin() + static_cast<std::ptrdiff_t>(events_.size() - policy_.count_n));
  } else {
    int64_t cutoff = events_.back().timestamp - policy_.span_ms;
    auto first_kept = std::lower_bound(
        events_.begin(), events_.end(), cutoff,
        [](const BehaviorEvent& ev, int64_t ts) { return ev.timestamp < ts; });
    events_.erase(events_.begin(), first_kept);
  }
}

BehaviorWindow EventStore::window() const { return window(policy_); }

BehaviorWindow EventStore::window(const WindowPolicy& policy) const {
  policy.validate();
  BehaviorWindow w;
  w.policy = policy;
  if (events_.empty()) return w;
  if (policy.kind == WindowPolicy::Kind::count) {
    std::size_t n = std::min(policy.count_n, events_.size());
    w.events.assign(events_.end() - static_cast<std::ptrdiff_t>(n), events_.end());
  } else {
    // Inclusive cutoff: an event exactly span_ms old still belongs.
    int64_t cutoff = events_.back().timestamp - policy.span_ms;
    auto first = std::lower_bound(
        events_.begin(), events_.end(), cutoff,
        [](const BehaviorEvent& ev, int64_t ts) { return ev.timestamp < ts; });
    w.events.assign(first, events_.end());
  }
  return w;
}

std::optional<int64_t> EventStore::newest_ts() const {
  if (events_.empty()) return std::nullopt;
  return events_.back().timestamp;
}

TagCatalog::TagCatalog(std::map<std::string, std::string> item_to_tag)
    : item_to_tag_(std::move(item_to_tag)) {
  for (const auto& [item, tag] : item_to_tag_) {
    if (item.empty()) fail(Errc::data, "catalog item_id must be non-empty");
    if (tag.empty()) fail(Errc::data, "catalog tag must be non-empty (item '" + item + "')");
    tags_.insert(tag);
  }
  tags_.insert(kUnknownTag);
}

const std::string& TagCatalog::tag_of(const std::string& item_id) const {
  static const std::string unknown = kUnknownTag;
  auto it = item_to_tag_.find(item_id);
  return it == item_to_tag_.end() ? unknown : it->second;
}

std::map<std::string, std::vector<std::string>> TagCatalog::items_by_tag() const {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [item, tag] : item_to_tag_) out[tag].push_back(item);
  return out;  // item lists inherit the map's sorted order
}

TagSet TagDistribution::support() const {
  TagSet s;
  for (const auto& [tag, _] : probs) s.insert(tag);
  return s;
}

double TagDistribution::prob_of(const std::string& tag) const {
  auto it = probs.find(tag);
  return it == probs.end() ? 0.0 : it->second;
}

void TagDistribution::validate() const {
  if (probs.empty()) fail(Errc::data, "tag distribution must be non-empty");
  double sum = 0.0;
  for (const auto& [tag, p] : probs) {
    if (tag.empty()) fail(Errc::data, "tag distribution key must be non-empty");
    if (!(p > 0.0)) fail(Errc::data, "tag distribution mass for '" + tag + "' must be > 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    fail(Errc::data, "tag distribution sums to " + std::to_string(sum) + ", expected 1");
}

TagDistribution TagDistribution::from_counts(const std::map<std::string, std::size_t>& counts) {
  TagDistribution d;
  std::size_t total = 0;
  for (const auto& [_, c] : counts) total += c;
  if (total == 0) fail(Errc::data, "cannot build a distribution from zero counts");
  for (const auto& [tag, c] : counts)
    if (c > 0) d.probs[tag] = static_cast<double>(c) / static_cast<double>(total);
  return d;
}

std::pair<TagSet, TagDistribution> map_to_tags(const BehaviorWindow& window,
                                               const TagCatalog& catalog) {
  if (window.empty()) fail(Errc::empty_window, "map_to_tags requires a non-empty window");
  std::map<std::string, std::size_t> counts;
  for (const auto& e : window.events) counts[catalog.tag_of(e.item_id)] += 1;
  TagDistribution dist = TagDistribution::from_counts(counts);
  return {dist.support(), std::move(dist)};
}

namespace {

// Howard Hinnant's civil-from-days; exact for the whole int64 range we use.
void civil_from_days(int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t yy = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y = static_cast<int>(yy + (m <= 2));
}

int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

}  // namespace

std::string iso8601_ms(int64_t epoch_ms) {
  int64_t days = floor_div(epoch_ms, 86'400'000);
  int64_t rem = epoch_ms - days * 86'400'000;
  int y;
  unsigned mo, d;
  civil_from_days(days, y, mo, d);
  int h = static_cast<int>(rem / 3'600'000);
  rem %= 3'600'000;
  int mi = static_cast<int>(rem / 60'000);
  rem %= 60'000;
  int s = static_cast<int>(rem / 1000);
  int ms = static_cast<int>(rem % 1000);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", y, mo, d, h, mi, s, ms);
  return buf;
}

std::string render_behavior_sequence(const std::vector<BehaviorEvent>& events) {
  std::string out;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i) out += ", ";
    out += "(";
    out += events[i].item_id;
    out += ", ";
    out += to_string(events[i].action);
    out += ", ";
    out += iso8601_ms(events[i].timestamp);
    out += ")";
  }
  return out;
}

}  // namespace intentgate

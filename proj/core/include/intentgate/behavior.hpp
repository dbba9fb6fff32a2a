#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "intentgate/errors.hpp"

namespace intentgate {

enum class ActionType { click, cart, favorite, purchase };
inline constexpr int kActionTypeCount = 4;

const char* to_string(ActionType a);
std::optional<ActionType> action_from_string(std::string_view s);

struct BehaviorEvent {
  std::string item_id;  // opaque, non-empty
  ActionType action = ActionType::click;
  int64_t timestamp = 0;  // milliseconds since epoch, >= 0

  bool operator==(const BehaviorEvent&) const = default;
};

struct WindowPolicy {
  enum class Kind { count, time };
  Kind kind = Kind::count;
  std::size_t count_n = 50;     // last-N policy
  int64_t span_ms = 3'600'000;  // trailing-time policy

  static WindowPolicy by_count(std::size_t n);
  static WindowPolicy by_time(int64_t span_ms);
  void validate() const;
};

// A slice of a user's recent events. Events are sorted non-decreasing by
// timestamp; the policy that produced the slice rides along for bookkeeping.
struct BehaviorWindow {
  std::vector<BehaviorEvent> events;
  WindowPolicy policy;

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }
  int64_t newest_ts() const;  // requires non-empty
  int64_t oldest_ts() const;  // requires non-empty
};

// In-memory per-user event log. Keeps events sorted, rejects timestamps older
// than the newest stored event minus the out-of-order tolerance, and evicts
// events the window policy can no longer select.
class EventStore {
 public:
  explicit EventStore(WindowPolicy policy, int64_t out_of_order_tolerance_ms = 5000);

  void append(const BehaviorEvent& event);

  BehaviorWindow window() const;  // uses the store's own policy
  BehaviorWindow window(const WindowPolicy& policy) const;

  const std::vector<BehaviorEvent>& events() const { return events_; }
  std::optional<int64_t> newest_ts() const;
  const WindowPolicy& policy() const { return policy_; }

 private:
  void trim();

  WindowPolicy policy_;
  int64_t tolerance_ms_;
  std::vector<BehaviorEvent> events_;  // sorted non-decreasing by timestamp
};

// Item -> tag lookup with a reserved "unknown" tag for unmapped items.
class TagCatalog {
 public:
  static constexpr const char* kUnknownTag = "unknown";

  TagCatalog() = default;
  explicit TagCatalog(std::map<std::string, std::string> item_to_tag);

  const std::string& tag_of(const std::string& item_id) const;
  std::size_t vocabulary_size() const { return tags_.size(); }  // includes "unknown"
  const std::map<std::string, std::string>& items() const { return item_to_tag_; }
  std::map<std::string, std::vector<std::string>> items_by_tag() const;

 private:
  std::map<std::string, std::string> item_to_tag_;
  std::set<std::string> tags_;  // always contains kUnknownTag
};

using TagSet = std::set<std::string>;

// Probability mass over tags. Zero-mass tags are omitted, so every stored
// probability is > 0 and the values sum to 1 (within 1e-9).
struct TagDistribution {
  std::map<std::string, double> probs;

  TagSet support() const;
  double prob_of(const std::string& tag) const;
  void validate() const;
  bool operator==(const TagDistribution&) const = default;

  static TagDistribution from_counts(const std::map<std::string, std::size_t>& counts);
};

// Each event contributes weight 1 to its item's tag. Empty windows are an
// error: there is no meaningful distribution to hand to the drift math.
std::pair<TagSet, TagDistribution> map_to_tags(const BehaviorWindow& window,
                                               const TagCatalog& catalog);

// Chronological "(item_id, action, iso8601-time)" rendering, comma-joined.
std::string render_behavior_sequence(const std::vector<BehaviorEvent>& events);

// UTC, millisecond precision: 2024-03-09T16:00:00.000Z
std::string iso8601_ms(int64_t epoch_ms);

}  // namespace intentgate

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "swag/graph.hpp"

namespace swag {

// Guest actions in increasing order of intent.
enum class Action { view = 0, add_to_cart = 1, purchase = 2 };

std::optional<Action> parse_action(std::string_view token);
std::string_view action_name(Action a);

struct SessionEvent {
  std::string session_id;
  std::int64_t timestamp = 0;
  std::string item;
  Action action = Action::view;
};

struct Session {
  std::string id;
  std::int64_t last_time = 0;
  // Highest action seen for each item in this session.
  std::map<std::string, Action> items;
  // Items with at least one view event; Jaccard weights use only these.
  std::set<std::string> viewed;
};

struct SessionLog {
  std::vector<Session> sessions;  // in order of first appearance
  std::size_t event_count = 0;
  std::size_t rejected_lines = 0;

  void add(const SessionEvent& e);
  const Session* find(std::string_view id) const;
  bool empty() const { return sessions.empty(); }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

// Reads `session_id<TAB>timestamp<TAB>item<TAB>action` lines. Malformed
// lines (wrong field count, bad or negative timestamp, unknown action) are
// skipped and counted in `rejected_lines`.
SessionLog parse_sessions(std::istream& in);

struct CooccurrenceConfig {
  double view_weight = 1.0;
  double add_to_cart_weight = 2.0;
  double purchase_weight = 4.0;
  // Defaults to the latest event time in the log.
  std::optional<std::int64_t> reference_time;
  double recency_unit_seconds = 86400.0;

  double weight(Action a) const;
  // Throws ConfigError unless 0 < view <= add_to_cart <= purchase and the
  // recency unit is positive.
  void check() const;
};

using ItemPair = std::pair<std::string, std::string>;  // first < second
// Canonically keyed raw pair scores.
using RawWeightTable = std::map<ItemPair, double>;

ItemPair canonical_pair(std::string_view a, std::string_view b);

// Relative co-view frequency: sessions viewing both over sessions viewing
// either. 0 when neither item was viewed.
double jaccard_frequency(const SessionLog& log, std::string_view i, std::string_view j);

// Frequencies of every pair co-viewed in at least one session.
RawWeightTable jaccard_table(const SessionLog& log);

// (2/pi) * atan(F / median_f). Throws ConfigError when median_f <= 0.
double arctan_scale(double frequency, double median_f);

// Median of the strictly positive values (mean of the middle two for an
// even count); 0 when there are none.
double positive_median(std::vector<double> values);

// Sum over sessions of W(i) W(j) / Rec(s) for every pair sharing a session,
// with W the weight of the item's highest action in that session and
// Rec(s) = max(1, ceil((reference_time - last event time) / unit)).
RawWeightTable cooccurrence_weights(const SessionLog& log, const CooccurrenceConfig& cfg);

// Recency divisor of one session under `cfg`.
double session_recency(const Session& s, std::int64_t reference_time, double unit_seconds);

// Directed per-node shares: (a, b) -> raw(a, b) / sum of raw scores at a.
// Both directions of every positive pair are present.
std::map<std::pair<std::string, std::string>, double> normalize_directed(const RawWeightTable& raw);

// Per-node normalization: each raw score is divided by the total raw score
// incident to its source node, the two directed values are averaged, and
// the result is passed through arctan_scale with the median of the positive
// normalized scores. Zero results are dropped.
std::vector<EdgeRecord> normalize_per_node(const RawWeightTable& raw);

// Jaccard pipeline: frequencies scaled by the median positive frequency.
std::vector<EdgeRecord> jaccard_edges(const SessionLog& log);

enum class WeightMode { jaccard, cooccurrence };
std::optional<WeightMode> parse_weight_mode(std::string_view token);

std::vector<EdgeRecord> generate_edges(const SessionLog& log, WeightMode mode,
                                       const CooccurrenceConfig& cfg);

}  // namespace swag

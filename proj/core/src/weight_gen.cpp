#include "swag/weight_gen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>

#include "swag/error.hpp"
#include "swag/text.hpp"

namespace swag {

std::optional<Action> parse_action(std::string_view token) {
  token = trim(token);
  if (token == "view") return Action::view;
  if (token == "add_to_cart" || token == "atc") return Action::add_to_cart;
  if (token == "purchase") return Action::purchase;
  return std::nullopt;
}

std::string_view action_name(Action a) {
  switch (a) {
    case Action::view:
      return "view";
    case Action::add_to_cart:
      return "add_to_cart";
    case Action::purchase:
      return "purchase";
  }
  return "view";
}

void SessionLog::add(const SessionEvent& e) {
  auto [it, inserted] = index_.emplace(e.session_id, sessions.size());
  if (inserted) {
    sessions.push_back({e.session_id, e.timestamp, {}, {}});
  }
  auto& s = sessions[it->second];
  s.last_time = std::max(s.last_time, e.timestamp);
  auto [item, fresh] = s.items.emplace(e.item, e.action);
  if (!fresh && e.action > item->second) item->second = e.action;
  if (e.action == Action::view) s.viewed.insert(e.item);
  ++event_count;
}

const Session* SessionLog::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &sessions[it->second];
}

SessionLog parse_sessions(std::istream& in) {
  SessionLog log;
  std::string line;
  while (std::getline(in, line)) {
    if (is_skippable(line)) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 4) {
      ++log.rejected_lines;
      continue;
    }
    const auto ts = parse_int(fields[1]);
    const auto action = parse_action(fields[3]);
    if (!ts || *ts < 0 || !action || trim(fields[0]).empty() || trim(fields[2]).empty()) {
      ++log.rejected_lines;
      continue;
    }
    log.add({std::string(trim(fields[0])), *ts, std::string(trim(fields[2])), *action});
  }
  return log;
}

double CooccurrenceConfig::weight(Action a) const {
  switch (a) {
    case Action::view:
      return view_weight;
    case Action::add_to_cart:
      return add_to_cart_weight;
    case Action::purchase:
      return purchase_weight;
  }
  return view_weight;
}

void CooccurrenceConfig::check() const {
  if (!(view_weight > 0.0 && view_weight <= add_to_cart_weight &&
        add_to_cart_weight <= purchase_weight && std::isfinite(purchase_weight))) {
    throw ConfigError("action weights must satisfy 0 < view <= add_to_cart <= purchase");
  }
  if (!(recency_unit_seconds > 0.0) || !std::isfinite(recency_unit_seconds)) {
    throw ConfigError("recency_unit_seconds must be positive");
  }
}

ItemPair canonical_pair(std::string_view a, std::string_view b) {
  if (b < a) std::swap(a, b);
  return {std::string(a), std::string(b)};
}

double jaccard_frequency(const SessionLog& log, std::string_view i, std::string_view j) {
  std::size_t both = 0;
  std::size_t either = 0;
  for (const auto& s : log.sessions) {
    const bool has_i = s.viewed.contains(std::string(i));
    const bool has_j = s.viewed.contains(std::string(j));
    both += (has_i && has_j) ? 1 : 0;
    either += (has_i || has_j) ? 1 : 0;
  }
  if (either == 0) return 0.0;
  return static_cast<double>(both) / static_cast<double>(either);
}

RawWeightTable jaccard_table(const SessionLog& log) {
  std::map<std::string, std::size_t> item_sessions;
  std::map<ItemPair, std::size_t> pair_sessions;
  for (const auto& s : log.sessions) {
    for (auto a = s.viewed.begin(); a != s.viewed.end(); ++a) {
      ++item_sessions[*a];
      for (auto b = std::next(a); b != s.viewed.end(); ++b) ++pair_sessions[{*a, *b}];
    }
  }
  RawWeightTable table;
  for (const auto& [pair, both] : pair_sessions) {
    const auto either = item_sessions[pair.first] + item_sessions[pair.second] - both;
    table.emplace(pair, static_cast<double>(both) / static_cast<double>(either));
  }
  return table;
}

double arctan_scale(double frequency, double median_f) {
  if (!(median_f > 0.0)) throw ConfigError("median frequency must be positive");
  return 2.0 / std::numbers::pi * std::atan(frequency / median_f);
}

double positive_median(std::vector<double> values) {
  std::erase_if(values, [](double v) { return !(v > 0.0); });
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double session_recency(const Session& s, std::int64_t reference_time, double unit_seconds) {
  const double age = static_cast<double>(reference_time - s.last_time);
  return std::max(1.0, std::ceil(age / unit_seconds));
}

RawWeightTable cooccurrence_weights(const SessionLog& log, const CooccurrenceConfig& cfg) {
  cfg.check();
  std::int64_t reference = 0;
  for (const auto& s : log.sessions) reference = std::max(reference, s.last_time);
  if (cfg.reference_time) {
    if (*cfg.reference_time < reference) {
      throw ConfigError("reference_time precedes the latest session event");
    }
    reference = *cfg.reference_time;
  }

  RawWeightTable table;
  for (const auto& s : log.sessions) {
    const double rec = session_recency(s, reference, cfg.recency_unit_seconds);
    for (auto a = s.items.begin(); a != s.items.end(); ++a) {
      for (auto b = std::next(a); b != s.items.end(); ++b) {
        table[{a->first, b->first}] += cfg.weight(a->second) * cfg.weight(b->second) / rec;
      }
    }
  }
  return table;
}

namespace {

std::vector<EdgeRecord> scale_to_edges(const RawWeightTable& scores) {
  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto& [pair, v] : scores) values.push_back(v);
  const double median = positive_median(std::move(values));
  std::vector<EdgeRecord> edges;
  if (median == 0.0) return edges;
  for (const auto& [pair, v] : scores) {
    const double w = arctan_scale(v, median);
    if (w > 0.0) edges.push_back({pair.first, pair.second, w, 0});
  }
  return edges;
}

}  // namespace

std::map<std::pair<std::string, std::string>, double> normalize_directed(const RawWeightTable& raw) {
  std::map<std::string, double> totals;
  for (const auto& [pair, v] : raw) {
    totals[pair.first] += v;
    totals[pair.second] += v;
  }
  std::map<std::pair<std::string, std::string>, double> shares;
  for (const auto& [pair, v] : raw) {
    if (!(v > 0.0)) continue;
    shares.emplace(std::pair{pair.first, pair.second}, v / totals[pair.first]);
    shares.emplace(std::pair{pair.second, pair.first}, v / totals[pair.second]);
  }
  return shares;
}

std::vector<EdgeRecord> normalize_per_node(const RawWeightTable& raw) {
  const auto shares = normalize_directed(raw);
  RawWeightTable symmetric;
  for (const auto& [pair, v] : shares) {
    if (pair.first > pair.second) continue;
    symmetric.emplace(pair, 0.5 * (v + shares.at({pair.second, pair.first})));
  }
  return scale_to_edges(symmetric);
}

std::vector<EdgeRecord> jaccard_edges(const SessionLog& log) {
  return scale_to_edges(jaccard_table(log));
}

std::optional<WeightMode> parse_weight_mode(std::string_view token) {
  token = trim(token);
  if (token == "jaccard") return WeightMode::jaccard;
  if (token == "cooccurrence") return WeightMode::cooccurrence;
  return std::nullopt;
}

std::vector<EdgeRecord> generate_edges(const SessionLog& log, WeightMode mode,
                                       const CooccurrenceConfig& cfg) {
  if (mode == WeightMode::jaccard) return jaccard_edges(log);
  return normalize_per_node(cooccurrence_weights(log, cfg));
}

}  // namespace swag

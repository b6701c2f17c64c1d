#include "swag/eval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <thread>

#include "json.hpp"

#include "swag/error.hpp"
#include "swag/text.hpp"

namespace swag {

RecommendationList knn(const Embeddings& emb, NodeId query, std::size_t k) {
  if (query >= emb.size()) throw IndexError("query node " + std::to_string(query) + " out of range");
  if (k >= emb.size()) {
    throw IndexError("k = " + std::to_string(k) + " must be below the node count " +
                     std::to_string(emb.size()));
  }
  const Eigen::VectorXd scores = emb.vectors().transpose() * emb.vector(query);
  std::vector<Recommendation> all;
  all.reserve(emb.size() - 1);
  for (NodeId i = 0; i < emb.size(); ++i) {
    if (i != query) all.push_back({i, scores[i]});
  }
  const auto better = [](const Recommendation& a, const Recommendation& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), better);
  all.resize(k);
  return {query, std::move(all)};
}

RecommendationList knn(const Embeddings& emb, std::string_view query, std::size_t k) {
  const auto id = emb.find(query);
  if (!id) throw IndexError("unknown query item '" + std::string(query) + "'");
  return knn(emb, *id, k);
}

TestRecordFile read_test_records(std::istream& in) {
  TestRecordFile file;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (is_skippable(line)) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2) {
      throw InputError("expected seed<TAB>views, got " + std::to_string(fields.size()) + " fields",
                       number);
    }
    TestRecord r{std::string(trim(fields[0])), {}};
    for (const auto v : split(fields[1], ',')) {
      const auto key = trim(v);
      if (key.empty() || key == r.seed) continue;
      r.views.emplace_back(key);
    }
    if (r.seed.empty() || r.views.empty()) {
      ++file.rejected;
      continue;
    }
    file.records.push_back(std::move(r));
  }
  return file;
}

namespace {

// Position (0-based) of id within the first `cutoff` items, or npos.
std::size_t position_in(const RecommendationList& recs, NodeId id, std::size_t cutoff) {
  const auto n = std::min(cutoff, recs.items.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (recs.items[i].id == id) return i;
  }
  return std::string::npos;
}

struct RecordScores {
  bool known = false;
  bool hit = false;
  double rr_5 = 0.0;
  double rr_25 = 0.0;
  std::vector<double> pr_5;
  std::vector<double> pr_25;
};

RecordScores score_record(const Embeddings& emb, const TestRecord& r, std::size_t top_n) {
  RecordScores s;
  const auto seed = emb.find(r.seed);
  if (!seed || emb.size() < 2) return s;
  s.known = true;
  std::vector<NodeId> truth;
  std::size_t unknown = 0;
  for (const auto& v : r.views) {
    if (const auto id = emb.find(v)) {
      truth.push_back(*id);
    } else {
      ++unknown;
    }
  }
  const auto depth = std::min(std::max<std::size_t>(top_n, 25), emb.size() - 1);
  const auto recs = knn(emb, *seed, depth);
  s.hit = top_n_hit(recs, truth, top_n);
  s.rr_5 = reciprocal_rank(recs, truth, 5);
  s.rr_25 = reciprocal_rank(recs, truth, 25);
  s.pr_5 = percentile_ranks(recs, truth, 5);
  s.pr_25 = percentile_ranks(recs, truth, 25);
  s.pr_5.insert(s.pr_5.end(), unknown, 1.0);
  s.pr_25.insert(s.pr_25.end(), unknown, 1.0);
  return s;
}

std::vector<RecordScores> score_all(const Embeddings& emb, std::span<const TestRecord> records,
                                    std::size_t top_n, std::size_t workers) {
  std::vector<RecordScores> out(records.size());
  workers = std::max<std::size_t>(1, std::min(workers, records.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < records.size(); ++i) out[i] = score_record(emb, records[i], top_n);
    return out;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < records.size(); i += workers) {
        out[i] = score_record(emb, records[i], top_n);
      }
    });
  }
  return out;
}

}  // namespace

double reciprocal_rank(const RecommendationList& recs, std::span<const NodeId> truth,
                       std::size_t cutoff) {
  std::size_t best = std::string::npos;
  for (const auto t : truth) best = std::min(best, position_in(recs, t, cutoff));
  return best == std::string::npos ? 0.0 : 1.0 / static_cast<double>(best + 1);
}

std::vector<double> percentile_ranks(const RecommendationList& recs,
                                     std::span<const NodeId> truth, std::size_t cutoff) {
  std::vector<double> out;
  out.reserve(truth.size());
  for (const auto t : truth) {
    const auto pos = position_in(recs, t, cutoff);
    out.push_back(pos == std::string::npos
                      ? 1.0
                      : static_cast<double>(pos) / static_cast<double>(cutoff));
  }
  return out;
}

bool top_n_hit(const RecommendationList& recs, std::span<const NodeId> truth, std::size_t n) {
  return std::any_of(truth.begin(), truth.end(),
                     [&](NodeId t) { return position_in(recs, t, n) != std::string::npos; });
}

EvalReport evaluate(const Embeddings& emb, std::span<const TestRecord> records,
                    std::size_t top_n, std::size_t workers) {
  if (top_n == 0) throw ConfigError("top_n must be >= 1");
  const auto scores = score_all(emb, records, top_n, workers);
  EvalReport r;
  r.top_n = top_n;
  std::size_t hits = 0;
  std::size_t pr_count = 0;
  for (const auto& s : scores) {
    if (!s.known) {
      ++r.skipped_records;
      continue;
    }
    ++r.records;
    hits += s.hit ? 1 : 0;
    r.mrr_5 += s.rr_5;
    r.mrr_25 += s.rr_25;
    for (const auto p : s.pr_5) r.mpr_5 += p;
    for (const auto p : s.pr_25) r.mpr_25 += p;
    pr_count += s.pr_5.size();
  }
  if (r.records > 0) {
    const auto n = static_cast<double>(r.records);
    r.view_rate = static_cast<double>(hits) / n;
    r.mrr_5 /= n;
    r.mrr_25 /= n;
  }
  if (pr_count > 0) {
    r.mpr_5 /= static_cast<double>(pr_count);
    r.mpr_25 /= static_cast<double>(pr_count);
  }
  return r;
}

double view_rate(const Embeddings& emb, std::span<const TestRecord> records, std::size_t n) {
  return evaluate(emb, records, n).view_rate;
}

double mean_reciprocal_rank(const Embeddings& emb, std::span<const TestRecord> records,
                            std::size_t cutoff) {
  if (cutoff != 5 && cutoff != 25) throw ConfigError("MRR cutoff must be 5 or 25");
  const auto r = evaluate(emb, records);
  return cutoff == 5 ? r.mrr_5 : r.mrr_25;
}

double mean_percentile_rank(const Embeddings& emb, std::span<const TestRecord> records,
                            std::size_t cutoff) {
  if (cutoff != 5 && cutoff != 25) throw ConfigError("MPR cutoff must be 5 or 25");
  const auto r = evaluate(emb, records);
  return cutoff == 5 ? r.mpr_5 : r.mpr_25;
}

void write_report(std::ostream& out, const EvalReport& r) {
  out << "# view_rate denominator: test records with a known seed item\n"
      << "records=" << r.records << '\n'
      << "skipped_records=" << r.skipped_records << '\n'
      << "top_n=" << r.top_n << '\n'
      << "view_rate=" << format_double(r.view_rate) << '\n'
      << "mrr@5=" << format_double(r.mrr_5) << '\n'
      << "mrr@25=" << format_double(r.mrr_25) << '\n'
      << "mpr@5=" << format_double(r.mpr_5) << '\n'
      << "mpr@25=" << format_double(r.mpr_25) << '\n';
}

void write_report_json(std::ostream& out, const EvalReport& r) {
  const nlohmann::ordered_json j = {
      {"records", r.records}, {"skipped_records", r.skipped_records},
      {"top_n", r.top_n},     {"view_rate", r.view_rate},
      {"mrr@5", r.mrr_5},     {"mrr@25", r.mrr_25},
      {"mpr@5", r.mpr_5},     {"mpr@25", r.mpr_25},
  };
  out << j.dump(2) << '\n';
}

CosineHistogram cosine_histogram(const Embeddings& emb, std::size_t n_pairs, std::size_t bins,
                                 Rng& rng) {
  if (emb.size() < 2) throw InputError("cosine histogram needs at least two embeddings");
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  CosineHistogram h;
  const double width = 2.0 / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  std::vector<double> values;
  values.reserve(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const auto a = static_cast<NodeId>(rng.below(emb.size()));
    auto b = static_cast<NodeId>(rng.below(emb.size() - 1));
    if (b >= a) ++b;
    const double c = std::clamp(emb.vector(a).dot(emb.vector(b)), -1.0, 1.0);
    values.push_back(c);
    const auto bin = static_cast<std::size_t>(std::floor((c + 1.0) / width));
    ++counts[std::min(bin, bins - 1)];
  }
  for (std::size_t b = 0; b < bins; ++b) {
    h.bin_left.push_back(-1.0 + width * static_cast<double>(b));
    h.bin_right.push_back(b + 1 == bins ? 1.0 : -1.0 + width * static_cast<double>(b + 1));
    h.density.push_back(n_pairs == 0 ? 0.0
                                     : static_cast<double>(counts[b]) /
                                           (static_cast<double>(n_pairs) * width));
  }
  h.pairs = n_pairs;
  if (!values.empty()) {
    double sum = 0.0;
    for (const auto v : values) sum += v;
    h.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (const auto v : values) sq += (v - h.mean) * (v - h.mean);
    h.spread = std::sqrt(sq / static_cast<double>(values.size()));
  }
  return h;
}

void write_histogram_csv(std::ostream& out, const CosineHistogram& h) {
  out << "bin_left,bin_right,density\n";
  for (std::size_t b = 0; b < h.density.size(); ++b) {
    out << format_double(h.bin_left[b]) << ',' << format_double(h.bin_right[b]) << ','
        << format_double(h.density[b]) << '\n';
  }
}

}  // namespace swag

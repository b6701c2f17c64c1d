#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swag/rng.hpp"
#include "swag/train.hpp"

namespace swag {

struct Recommendation {
  NodeId id = 0;
  double score = 0.0;
};

// Ranked by descending score, ties by ascending id; the seed is excluded.
struct RecommendationList {
  NodeId seed = 0;
  std::vector<Recommendation> items;
};

// Exact top-k by cosine similarity (dot product of unit rows). Requires
// k < size(); throws IndexError for an unknown query.
RecommendationList knn(const Embeddings& emb, NodeId query, std::size_t k);
RecommendationList knn(const Embeddings& emb, std::string_view query, std::size_t k);

// One held-out interaction: the seed item and the items viewed after it.
struct TestRecord {
  std::string seed;
  std::vector<std::string> views;
};

// `seed<TAB>view1,view2,...`. The seed is removed from its own views;
// records left with no views are counted in `rejected` and dropped.
struct TestRecordFile {
  std::vector<TestRecord> records;
  std::size_t rejected = 0;
};
TestRecordFile read_test_records(std::istream& in);

// 1/rank of the first truth item in the top `cutoff`; 0 if none.
double reciprocal_rank(const RecommendationList& recs, std::span<const NodeId> truth,
                       std::size_t cutoff);

// Per truth item: (rank - 1) / cutoff when it is in the top `cutoff`,
// otherwise 1.
std::vector<double> percentile_ranks(const RecommendationList& recs,
                                     std::span<const NodeId> truth, std::size_t cutoff);

// Whether any truth item is in the top n.
bool top_n_hit(const RecommendationList& recs, std::span<const NodeId> truth, std::size_t n);

struct EvalReport {
  double view_rate = 0.0;
  double mrr_5 = 0.0;
  double mrr_25 = 0.0;
  double mpr_5 = 0.0;
  double mpr_25 = 0.0;
  std::size_t records = 0;          // records with a known seed
  std::size_t skipped_records = 0;  // seeds without an embedding
  std::size_t top_n = 5;
};

// Record-level view rate, MRR and MPR. Records are the unit of the view
// rate denominator. Records whose seed has no embedding are excluded from
// every denominator and counted in `skipped_records`. Truth items without
// an embedding can never be hit.
EvalReport evaluate(const Embeddings& emb, std::span<const TestRecord> records,
                    std::size_t top_n = 5, std::size_t workers = 1);

double view_rate(const Embeddings& emb, std::span<const TestRecord> records, std::size_t n);
double mean_reciprocal_rank(const Embeddings& emb, std::span<const TestRecord> records,
                            std::size_t cutoff);
double mean_percentile_rank(const Embeddings& emb, std::span<const TestRecord> records,
                            std::size_t cutoff);

void write_report(std::ostream& out, const EvalReport& r);
void write_report_json(std::ostream& out, const EvalReport& r);

struct CosineHistogram {
  std::vector<double> bin_left;
  std::vector<double> bin_right;
  std::vector<double> density;  // integrates to 1 over [-1, 1]
  double mean = 0.0;
  double spread = 0.0;  // population standard deviation
  std::size_t pairs = 0;
};

// Cosines of `n_pairs` uniformly drawn pairs of distinct nodes, binned over
// [-1, 1] (the last bin includes 1).
CosineHistogram cosine_histogram(const Embeddings& emb, std::size_t n_pairs, std::size_t bins,
                                 Rng& rng);

// CSV: bin_left,bin_right,density.
void write_histogram_csv(std::ostream& out, const CosineHistogram& h);

}  // namespace swag

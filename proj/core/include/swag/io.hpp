#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swag/graph.hpp"
#include "swag/model.hpp"
#include "swag/train.hpp"

namespace swag {

// Feature file: a `node_count<TAB>dim` header line, then one
// `external_key<TAB>v1,v2,...` line per node.
struct FeatureTable {
  std::vector<std::string> keys;
  Eigen::MatrixXd values;  // dim x keys.size()
};

FeatureTable read_features(std::istream& in);
void write_features(std::ostream& out, const FeatureTable& table);

// Columns of `table` reordered to the graph's dense ids. Throws InputError
// naming the first graph node without a feature row.
Eigen::MatrixXd align_features(const FeatureTable& table, const WeightedGraph& g);

// Embedding file: `external_key<TAB>e1,e2,...`, one line per node.
void write_embeddings(std::ostream& out, const Embeddings& emb);
Embeddings read_embeddings(std::istream& in);

// Everything needed to rebuild the model for inference.
//
// Text format, version 1:
//   swag-checkpoint<TAB>1
//   param<TAB>name<TAB>value          (one line per hyperparameter)
//   matrix<TAB>name<TAB>rows<TAB>cols (followed by `rows` comma-joined lines)
//   end
// Values are shortest round-trip decimals, so a write/read cycle is exact.
// Matrix names are W1..WK, P1..PK (pooling layers only) and W0 (fusion).
struct Checkpoint {
  Hyperparams hp;
  std::size_t input_dim = 0;
  std::size_t secondary_dim = 0;
  ModelParams params;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

// `# swag <command> seed=<n> config=<hash>` provenance line written at the
// top of every output artifact.
std::string artifact_header(const std::string& command, std::uint64_t seed,
                            const std::string& config_hash);

}  // namespace swag

#include "swag/io.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "swag/error.hpp"
#include "swag/text.hpp"

namespace swag {

namespace {

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::vector<std::size_t> parse_sizes(std::string_view s, std::size_t line) {
  std::vector<std::size_t> out;
  if (trim(s).empty()) return out;
  for (const auto f : split(s, ',')) {
    const auto v = parse_uint(f);
    if (!v) throw InputError("bad count list '" + std::string(s) + "'", line);
    out.push_back(static_cast<std::size_t>(*v));
  }
  return out;
}

void write_matrix(std::ostream& out, const std::string& name, const Eigen::MatrixXd& m) {
  out << "matrix\t" << name << '\t' << m.rows() << '\t' << m.cols() << '\n';
  std::vector<double> row(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    out << format_vector(row.data(), row.size()) << '\n';
  }
}

}  // namespace

FeatureTable read_features(std::istream& in) {
  std::string line;
  std::size_t number = 0;
  std::size_t expected_rows = 0;
  std::size_t dim = 0;
  bool have_header = false;
  std::vector<std::string> keys;
  std::vector<double> flat;
  std::map<std::string, std::size_t> seen;

  while (std::getline(in, line)) {
    ++number;
    if (is_skippable(line)) continue;
    const auto fields = split(line, '\t');
    if (!have_header) {
      const auto count = fields.size() == 2 ? parse_uint(fields[0]) : std::nullopt;
      const auto width = fields.size() == 2 ? parse_uint(fields[1]) : std::nullopt;
      if (!count || !width || *width == 0) {
        throw InputError("feature header must be node_count<TAB>dim", number);
      }
      expected_rows = static_cast<std::size_t>(*count);
      dim = static_cast<std::size_t>(*width);
      have_header = true;
      continue;
    }
    if (fields.size() != 2) throw InputError("expected key<TAB>values", number);
    const auto values = parse_vector(fields[1]);
    if (!values) throw InputError("bad feature values", number);
    if (values->size() != dim) {
      throw InputError("feature row has " + std::to_string(values->size()) + " values, expected " +
                           std::to_string(dim),
                       number);
    }
    for (const auto v : *values) {
      if (!std::isfinite(v)) throw InputError("non-finite feature value", number);
    }
    std::string key(trim(fields[0]));
    if (!seen.emplace(key, keys.size()).second) {
      throw InputError("duplicate feature row for '" + key + "'", number);
    }
    keys.push_back(std::move(key));
    flat.insert(flat.end(), values->begin(), values->end());
  }
  if (!have_header) throw InputError("empty feature file");
  if (keys.size() != expected_rows) {
    throw InputError("feature header declares " + std::to_string(expected_rows) + " rows, found " +
                     std::to_string(keys.size()));
  }
  FeatureTable table;
  table.values = Eigen::Map<const Eigen::MatrixXd>(flat.data(), static_cast<Eigen::Index>(dim),
                                                   static_cast<Eigen::Index>(keys.size()));
  table.keys = std::move(keys);
  return table;
}

void write_features(std::ostream& out, const FeatureTable& table) {
  out << table.keys.size() << '\t' << table.values.rows() << '\n';
  for (std::size_t i = 0; i < table.keys.size(); ++i) {
    const Eigen::VectorXd col = table.values.col(static_cast<Eigen::Index>(i));
    out << table.keys[i] << '\t' << format_vector(col.data(), static_cast<std::size_t>(col.size()))
        << '\n';
  }
}

Eigen::MatrixXd align_features(const FeatureTable& table, const WeightedGraph& g) {
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < table.keys.size(); ++i) index.emplace(table.keys[i], i);
  Eigen::MatrixXd out(table.values.rows(), static_cast<Eigen::Index>(g.node_count()));
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto it = index.find(g.key(u));
    if (it == index.end()) throw InputError("missing feature row for node '" + g.key(u) + "'");
    out.col(u) = table.values.col(static_cast<Eigen::Index>(it->second));
  }
  return out;
}

void write_embeddings(std::ostream& out, const Embeddings& emb) {
  for (NodeId i = 0; i < emb.size(); ++i) {
    const Eigen::VectorXd v = emb.vector(i);
    out << emb.key(i) << '\t' << format_vector(v.data(), static_cast<std::size_t>(v.size()))
        << '\n';
  }
}

Embeddings read_embeddings(std::istream& in) {
  std::string line;
  std::size_t number = 0;
  std::vector<std::string> keys;
  std::vector<double> flat;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++number;
    if (is_skippable(line)) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2) throw InputError("expected key<TAB>values", number);
    const auto values = parse_vector(fields[1]);
    if (!values || values->empty()) throw InputError("bad embedding values", number);
    if (keys.empty()) dim = values->size();
    if (values->size() != dim) throw InputError("embedding width changes", number);
    keys.emplace_back(trim(fields[0]));
    flat.insert(flat.end(), values->begin(), values->end());
  }
  Eigen::MatrixXd vectors = Eigen::Map<const Eigen::MatrixXd>(
      flat.data(), static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(keys.size()));
  return Embeddings(std::move(keys), std::move(vectors));
}

void write_checkpoint(std::ostream& out, const Checkpoint& c) {
  const auto& hp = c.hp;
  std::string aggs;
  for (std::size_t i = 0; i < hp.aggregators.size(); ++i) {
    aggs += (i ? "," : "") + std::string(aggregator_name(hp.aggregators[i]));
  }
  out << "swag-checkpoint\t1\n";
  auto param = [&out](const char* name, const std::string& value) {
    out << "param\t" << name << '\t' << value << '\n';
  };
  param("input_dim", std::to_string(c.input_dim));
  param("secondary_dim", std::to_string(c.secondary_dim));
  param("alpha", format_double(hp.alpha));
  param("beta", format_double(hp.beta));
  param("gamma", format_double(hp.gamma));
  param("layer_sizes", join_sizes(hp.layer_sizes));
  param("hidden_dims", join_sizes(hp.hidden_dims));
  param("out_dim", std::to_string(hp.out_dim));
  param("aggregators", aggs);
  param("negatives", std::to_string(hp.negatives));
  param("negative_distribution",
        hp.negative_distribution == NegativeDistribution::uniform ? "uniform" : "degree075");
  param("walk_length", std::to_string(hp.walk.walk_length));
  param("walks_per_node", std::to_string(hp.walk.walks_per_node));
  param("window", std::to_string(hp.walk.window));
  param("learning_rate", format_double(hp.learning_rate));
  param("epochs", std::to_string(hp.epochs));
  param("batch_size", std::to_string(hp.batch_size));

  for (std::size_t k = 0; k < c.params.layers.size(); ++k) {
    write_matrix(out, "W" + std::to_string(k + 1), c.params.layers[k]);
  }
  for (std::size_t k = 0; k < c.params.pools.size(); ++k) {
    if (c.params.pools[k].size() > 0) {
      write_matrix(out, "P" + std::to_string(k + 1), c.params.pools[k]);
    }
  }
  if (c.params.fusion.size() > 0) write_matrix(out, "W0", c.params.fusion);
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  std::size_t number = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++number;
      if (!is_skippable(line)) return true;
    }
    return false;
  };

  if (!next() || trim(line) != "swag-checkpoint\t1") {
    throw InputError("not a version-1 swag checkpoint", number);
  }
  std::map<std::string, std::string> params;
  std::map<std::string, Eigen::MatrixXd> matrices;
  bool ended = false;
  while (next()) {
    const auto fields = split(line, '\t');
    if (fields[0] == "end") {
      ended = true;
      break;
    }
    if (fields[0] == "param" && fields.size() == 3) {
      params[std::string(fields[1])] = std::string(trim(fields[2]));
      continue;
    }
    if (fields[0] == "matrix" && fields.size() == 4) {
      const auto rows = parse_uint(fields[2]);
      const auto cols = parse_uint(fields[3]);
      if (!rows || !cols) throw InputError("bad matrix shape", number);
      const std::string name(fields[1]);
      Eigen::MatrixXd m(static_cast<Eigen::Index>(*rows), static_cast<Eigen::Index>(*cols));
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (!next()) throw InputError("truncated matrix", number);
        const auto values = parse_vector(line);
        if (!values || values->size() != *cols) throw InputError("bad matrix row", number);
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = (*values)[static_cast<std::size_t>(c)];
      }
      if (!m.allFinite()) throw InputError("non-finite checkpoint entry", number);
      matrices[name] = std::move(m);
      continue;
    }
    throw InputError("unrecognized checkpoint line", number);
  }
  if (!ended) throw InputError("checkpoint is missing its end marker", number);

  auto get = [&params](const char* name) -> const std::string& {
    const auto it = params.find(name);
    if (it == params.end()) throw InputError(std::string("checkpoint lacks param ") + name);
    return it->second;
  };
  auto get_double = [&](const char* name) {
    const auto v = parse_double(get(name));
    if (!v) throw InputError(std::string("bad checkpoint param ") + name);
    return *v;
  };
  auto get_size = [&](const char* name) {
    const auto v = parse_uint(get(name));
    if (!v) throw InputError(std::string("bad checkpoint param ") + name);
    return static_cast<std::size_t>(*v);
  };

  Checkpoint c;
  c.input_dim = get_size("input_dim");
  c.secondary_dim = get_size("secondary_dim");
  c.hp.alpha = get_double("alpha");
  c.hp.beta = get_double("beta");
  c.hp.gamma = get_double("gamma");
  c.hp.layer_sizes = parse_sizes(get("layer_sizes"), 0);
  c.hp.hidden_dims = parse_sizes(get("hidden_dims"), 0);
  c.hp.out_dim = get_size("out_dim");
  c.hp.aggregators.clear();
  for (const auto token : split(get("aggregators"), ',')) {
    const auto a = parse_aggregator(token);
    if (!a) throw InputError("unknown aggregator '" + std::string(token) + "'");
    c.hp.aggregators.push_back(*a);
  }
  c.hp.negatives = get_size("negatives");
  const auto dist = parse_negative_distribution(get("negative_distribution"));
  if (!dist) throw InputError("bad negative_distribution");
  c.hp.negative_distribution = *dist;
  c.hp.walk.walk_length = get_size("walk_length");
  c.hp.walk.walks_per_node = get_size("walks_per_node");
  c.hp.walk.window = get_size("window");
  c.hp.learning_rate = get_double("learning_rate");
  c.hp.epochs = get_size("epochs");
  c.hp.batch_size = get_size("batch_size");
  c.hp.check();

  for (std::size_t k = 1; k <= c.hp.depth(); ++k) {
    const auto w = matrices.find("W" + std::to_string(k));
    if (w == matrices.end()) throw InputError("checkpoint lacks W" + std::to_string(k));
    c.params.layers.push_back(w->second);
    const auto p = matrices.find("P" + std::to_string(k));
    if (is_pool(c.hp.aggregators[k - 1]) != (p != matrices.end())) {
      throw InputError("pooling matrix P" + std::to_string(k) + " does not match the aggregator");
    }
    c.params.pools.push_back(p == matrices.end() ? Eigen::MatrixXd() : p->second);
  }
  if (const auto f = matrices.find("W0"); f != matrices.end()) c.params.fusion = f->second;
  if ((c.secondary_dim > 0) != (c.params.fusion.size() > 0)) {
    throw InputError("fusion matrix does not match secondary_dim");
  }

  // Shapes must be exactly what init_params would produce.
  Rng probe(0);
  const auto expected = init_params(c.hp, c.input_dim, c.secondary_dim, probe);
  const auto want = expected.tensors();
  const auto have = c.params.tensors();
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (want[i]->rows() != have[i]->rows() || want[i]->cols() != have[i]->cols()) {
      throw InputError("checkpoint matrix shapes do not match its hyperparameters");
    }
  }
  return c;
}

std::string artifact_header(const std::string& command, std::uint64_t seed,
                            const std::string& config_hash) {
  std::ostringstream s;
  s << "# swag " << command << " seed=" << seed << " config=" << config_hash << '\n';
  return s.str();
}

}  // namespace swag

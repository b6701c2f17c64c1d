#include "fixtures.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <utility>

namespace fixtures {

std::string key(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "n%03zu", i);
  return buf;
}

std::vector<swag::EdgeRecord> random_edges(std::size_t nodes, std::size_t edges,
                                           std::uint64_t seed) {
  swag::Rng rng(seed);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<swag::EdgeRecord> out;
  auto add = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    const auto p = std::minmax(a, b);
    if (!seen.insert(p).second) return;
    out.push_back({key(p.first), key(p.second), 1.0 - rng.uniform(), 0});
  };
  for (std::size_t i = 0; i < nodes; ++i) add(i, (i + 1) % nodes);
  while (out.size() < edges) add(rng.below(nodes), rng.below(nodes));
  return out;
}

std::vector<swag::EdgeRecord> with_weight(std::vector<swag::EdgeRecord> edges, double w) {
  for (auto& e : edges) e.weight = w;
  return edges;
}

Eigen::MatrixXd random_features(std::size_t dim, std::size_t nodes, std::uint64_t seed) {
  swag::Rng rng(seed);
  Eigen::MatrixXd f(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(nodes));
  for (Eigen::Index c = 0; c < f.cols(); ++c) {
    for (Eigen::Index r = 0; r < f.rows(); ++r) {
      f(r, c) = rng.uniform() + rng.uniform() + rng.uniform() - 1.5;
    }
  }
  return f;
}

TwoBlock two_block(std::size_t half, std::size_t intra_degree, std::size_t bridges,
                   std::size_t dim, double feature_signal, std::uint64_t seed) {
  swag::Rng rng(seed);
  TwoBlock tb;
  tb.half = half;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  auto add = [&](std::size_t a, std::size_t b, double w) {
    const auto p = std::minmax(a, b);
    if (a == b || !seen.insert(p).second) return false;
    tb.edges.push_back({key(p.first), key(p.second), w, 0});
    return true;
  };
  for (std::size_t block = 0; block < 2; ++block) {
    for (std::size_t i = 0; i < half; ++i) {
      for (std::size_t d = 1; d <= intra_degree; ++d) {
        add(block * half + i, block * half + (i + d) % half, 0.9);
      }
    }
  }
  for (std::size_t added = 0; added < bridges;) {
    if (add(rng.below(half), half + rng.below(half), 0.1)) ++added;
  }

  tb.features = random_features(dim, 2 * half, seed ^ 0x5eedULL);
  for (std::size_t i = 0; i < 2 * half; ++i) {
    // Block 0 leans on the first half of the coordinates, block 1 on the rest.
    for (std::size_t r = 0; r < dim; ++r) {
      const bool first = r < dim / 2;
      if (first == (tb.block(i) == 0)) {
        tb.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) += feature_signal;
      }
    }
  }
  return tb;
}

Margin block_margin(const Eigen::MatrixXd& z, const TwoBlock& tb) {
  double intra = 0.0, inter = 0.0;
  std::size_t n_intra = 0, n_inter = 0;
  for (Eigen::Index a = 0; a < z.cols(); ++a) {
    for (Eigen::Index b = a + 1; b < z.cols(); ++b) {
      const double c = z.col(a).dot(z.col(b));
      if (tb.block(static_cast<std::size_t>(a)) == tb.block(static_cast<std::size_t>(b))) {
        intra += c;
        ++n_intra;
      } else {
        inter += c;
        ++n_inter;
      }
    }
  }
  return {intra / static_cast<double>(n_intra), inter / static_cast<double>(n_inter)};
}

double max_relative_error(const swag::ModelParams& analytic, const swag::ModelParams& numeric,
                          double floor) {
  const auto a = analytic.tensors();
  const auto n = numeric.tensors();
  double worst = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a[t]->size() == 0) continue;
    const double scale = std::max(a[t]->norm(), n[t]->norm());
    if (scale < floor) continue;
    worst = std::max(worst, (*a[t] - *n[t]).norm() / scale);
  }
  return worst;
}

}  // namespace fixtures

namespace fixtures {

void write_dataset(const std::filesystem::path& dir, std::size_t items, std::size_t sessions,
                   std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  swag::Rng rng(seed);
  const std::size_t groups = 4;
  const auto item = [](std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "i%03zu", i);
    return std::string(buf);
  };
  const auto in_group = [&](std::size_t g) {
    return g + groups * rng.below((items - g + groups - 1) / groups);
  };
  const char* actions[] = {"view", "view", "view", "add_to_cart", "purchase"};

  std::ofstream s(dir / "sessions.tsv");
  for (std::size_t k = 0; k < sessions; ++k) {
    const std::size_t g = rng.below(groups);
    const std::int64_t t = 1700000000 + static_cast<std::int64_t>(rng.below(30 * 86400));
    const std::size_t len = 3 + rng.below(4);
    for (std::size_t e = 0; e < len; ++e) {
      const std::size_t i = rng.uniform() < 0.9 ? in_group(g) : rng.below(items);
      s << 's' << k << '\t' << t + static_cast<std::int64_t>(e) << '\t' << item(i) << '\t'
        << actions[rng.below(5)] << '\n';
    }
  }

  std::ofstream f(dir / "features.tsv");
  f << items << "\t8\n";
  for (std::size_t i = 0; i < items; ++i) {
    f << item(i);
    for (std::size_t d = 0; d < 8; ++d) {
      const double signal = d == i % groups ? 1.0 : 0.0;
      f << (d == 0 ? '\t' : ',') << signal + 0.5 * (rng.uniform() - 0.5);
    }
    f << '\n';
  }

  std::ofstream t(dir / "test.tsv");
  for (std::size_t k = 0; k < items; ++k) {
    const std::size_t i = rng.below(items);
    t << item(i);
    for (std::size_t v = 0; v < 3; ++v) t << (v == 0 ? '\t' : ',') << item(in_group(i % groups));
    t << '\n';
  }
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("swag_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace fixtures

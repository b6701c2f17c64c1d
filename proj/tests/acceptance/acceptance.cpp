// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "commands.hpp"
#include "fixtures.hpp"
#include "reference_sage.hpp"
#include "swag/eval.hpp"
#include "swag/io.hpp"
#include "swag/sampling.hpp"
#include "swag/train.hpp"
#include "swag/weight_gen.hpp"

namespace {

using namespace swag;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// 1. Reduction to plain GraphSAGE.

ref::Mat to_ref(const Eigen::MatrixXd& m) {
  ref::Mat out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r)].push_back(m(r, c));
  }
  return out;
}

ref::Agg to_ref(Aggregator a) {
  switch (a) {
    case Aggregator::mean: return ref::Agg::mean;
    case Aggregator::gcn: return ref::Agg::gcn;
    case Aggregator::max_pool: return ref::Agg::max_pool;
    case Aggregator::mean_pool: return ref::Agg::mean_pool;
  }
  return ref::Agg::mean;
}

double max_diff(const Eigen::MatrixXd& m, const ref::Cols& cols) {
  double worst = 0.0;
  if (static_cast<std::size_t>(m.cols()) != cols.size()) return INFINITY;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (static_cast<std::size_t>(m.rows()) != cols[c].size()) return INFINITY;
    for (std::size_t r = 0; r < cols[c].size(); ++r) {
      worst = std::max(worst, std::abs(m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) -
                                       cols[c][r]));
    }
  }
  return worst;
}

Verdict reduction() {
  Verdict v;
  double worst = 0.0;
  const auto weighted = fixtures::random_edges(50, 200, 101);
  const auto features = fixtures::random_features(16, 50, 102);
  ref::Cols ref_features;
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    ref_features.emplace_back(features.col(c).data(), features.col(c).data() + features.rows());
  }

  for (const bool unit_weights : {false, true}) {
    const auto edges = unit_weights ? fixtures::with_weight(weighted, 1.0) : weighted;
    const auto g = build_graph(edges);
    const auto rg = ref::from_edges(edges);
    v.require(g.keys() == rg.keys, "node ids differ from the reference");
    FeatureMatrix f;
    f.primary = features;

    for (const auto agg : {Aggregator::mean, Aggregator::gcn, Aggregator::max_pool,
                           Aggregator::mean_pool}) {
      Hyperparams hp;
      hp.layer_sizes = {5, 3};
      hp.hidden_dims = {12};
      hp.out_dim = 8;
      hp.aggregators = {agg, agg};
      Rng init(103);
      const auto params = init_params(hp, 16, 0, init);
      std::vector<ref::Layer> layers;
      for (std::size_t k = 0; k < 2; ++k) {
        layers.push_back({to_ref(params.layers[k]), to_ref(params.pools[k]), to_ref(agg)});
      }

      std::vector<NodeId> targets(50);
      std::iota(targets.begin(), targets.end(), NodeId{0});
      const std::vector<std::uint32_t> ref_targets(targets.begin(), targets.end());

      // Draws and per-layer states for one batch.
      Rng a(104), b(104);
      const NeighborSampler sampler(g, 0.0);
      const auto batch = build_layered_batch(sampler, targets, hp.layer_sizes, a, true);
      const auto hops = ref::sample_hops(rg, ref_targets, hp.layer_sizes, b);
      for (std::size_t j = 0; j < hops.size(); ++j) {
        v.require(std::equal(batch.hops[j].begin(), batch.hops[j].end(), hops[j].begin(),
                             hops[j].end()),
                  "sampled hop " + std::to_string(j) + " differs");
      }
      const auto trace = forward_trace(batch, f, params, hp);
      const auto states = ref::forward(hops, hp.layer_sizes, ref_features, layers);
      for (std::size_t k = 0; k < states.size(); ++k) {
        for (std::size_t j = 0; j < states[k].size(); ++j) {
          worst = std::max(worst, max_diff(trace.states[k][j], states[k][j]));
        }
      }

      // Final embeddings through the inference entry point.
      const auto emb = embed_all(g, f, params, hp, 105);
      Rng c(derive_seed(derive_seed(105, kEmbedStream), 0));
      const auto emb_hops = ref::sample_hops(rg, ref_targets, hp.layer_sizes, c);
      const auto emb_states = ref::forward(emb_hops, hp.layer_sizes, ref_features, layers);
      worst = std::max(worst, max_diff(emb.vectors(), emb_states.back().front()));

      // Loss with alpha = 0 on walk pairs: the path weight drops out.
      WalkConfig wc;
      wc.seed = 106;
      wc.walks_per_node = 1;
      const auto pairs = positive_pairs(sampler, wc);
      const NegativeSampler negs(g, NegativeDistribution::uniform, 5);
      Rng nr(107);
      for (std::size_t p = 0; p < pairs.size(); p += 7) {
        const auto& pr = pairs[p];
        const auto drawn = negs.draw(pr.u, pr.v, nr);
        std::vector<double> dots;
        ref::Cols neg_cols;
        for (const auto n : drawn) {
          dots.push_back(emb.vector(pr.u).dot(emb.vector(n)));
          neg_cols.push_back(emb_states.back().front()[n]);
        }
        const double ours = pair_loss(emb.vector(pr.u).dot(emb.vector(pr.v)), dots, pr.r, 0.0).loss;
        const double theirs = ref::pair_loss(emb_states.back().front()[pr.u],
                                             emb_states.back().front()[pr.v], neg_cols);
        worst = std::max(worst, std::abs(ours - theirs));
      }
    }
  }
  v.require(worst < 1e-9, "max abs diff " + fmt(worst));
  if (v.pass) v.detail = "4 aggregators, weighted and unit graphs, max abs diff " + fmt(worst);
  return v;
}

// 2. Gradients.

Verdict gradients() {
  Verdict v;
  double worst = 0.0;
  for (const auto agg : {Aggregator::mean, Aggregator::gcn, Aggregator::max_pool,
                         Aggregator::mean_pool}) {
    const auto g = build_graph(fixtures::random_edges(10, 20, 201));
    FeatureMatrix f;
    f.primary = fixtures::random_features(5, 10, 202);
    Hyperparams hp;
    hp.layer_sizes = {3, 2};
    hp.hidden_dims = {4};
    hp.out_dim = 3;
    hp.aggregators = {agg, agg};
    hp.alpha = 0.7;
    hp.beta = 0.5;
    hp.gamma = 1.3;
    PairBatch pairs;
    pairs.pairs = {{0, 1, 0.6}, {2, 5, 0.3}, {7, 3, 0.9}, {4, 8, 1.0}};
    pairs.negatives = {{6, 9}, {1, 8}, {0, 2}, {3, 6}};
    const NeighborSampler sampler(g, hp.beta);
    Rng rng(203);
    const auto batch = build_layered_batch(sampler, pairs.nodes(), hp.layer_sizes, rng);
    Rng init(204);
    const auto params = init_params(hp, 5, 0, init);
    const auto analytic = batch_loss_and_gradient(pairs, batch, f, params, hp);
    const auto numeric = fixtures::numeric_gradient(params, 1e-5, [&](const ModelParams& p) {
      return batch_loss(pairs, batch, f, p, hp);
    });
    const double err = fixtures::max_relative_error(analytic.gradient, numeric);
    worst = std::max(worst, err);
    v.require(err < 1e-4, std::string(aggregator_name(agg)) + " relative error " + fmt(err));
  }
  if (v.pass) v.detail = "4 aggregators, K=2, max relative error " + fmt(worst);
  return v;
}

// 3. Sampling law.

Verdict sampling_law() {
  Verdict v;
  const std::vector<double> w{0.1, 0.2, 0.3, 0.4};
  std::vector<EdgeRecord> edges;
  for (std::size_t i = 0; i < w.size(); ++i) edges.push_back({"c", "l" + std::to_string(i), w[i], 0});
  const auto g = build_graph(edges);
  const auto c = *g.find("c");
  const std::size_t n = 100000;
  std::string detail;
  for (const double beta : {1.0, 0.0}) {
    const NeighborSampler s(g, beta);
    Rng rng(301);
    std::vector<double> counts(4, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto id = s.draw(c, rng).id;
      counts[std::stoul(g.key(id).substr(1))] += 1.0;
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const double expected = beta == 1.0 ? w[i] : 0.25;
      const double freq = counts[i] / static_cast<double>(n);
      v.require(std::abs(freq - expected) <= 0.01,
                "beta=" + fmt(beta) + " frequency " + fmt(freq) + " vs " + fmt(expected));
      const double e = expected * static_cast<double>(n);
      stat += (counts[i] - e) * (counts[i] - e) / e;
    }
    const boost::math::chi_squared dist(3.0);
    const double p = boost::math::cdf(boost::math::complement(dist, stat));
    v.require(p > 0.001, "beta=" + fmt(beta) + " chi-square p=" + fmt(p));
    detail += (detail.empty() ? "" : ", ") + std::string("beta=") + fmt(beta) + " p=" + fmt(p);
  }
  if (v.pass) v.detail = "1e5 draws, " + detail;
  return v;
}

// 4. Weight generation.

SessionLog log_from(const std::string& text) {
  std::istringstream in(text);
  return parse_sessions(in);
}

Verdict weight_oracles() {
  Verdict v;
  const auto log = log_from(
      "s1\t100\tA\tview\ns1\t101\tB\tview\n"
      "s2\t200\tA\tview\n"
      "s3\t300\tA\tview\ns3\t301\tB\tview\ns3\t302\tC\tview\n");
  v.require(jaccard_frequency(log, "A", "B") == 2.0 / 3.0, "F(A,B) != 2/3");
  v.require(jaccard_frequency(log, "A", "C") == 1.0 / 3.0, "F(A,C) != 1/3");
  v.require(jaccard_frequency(log, "B", "C") == 1.0 / 2.0, "F(B,C) != 1/2");
  const auto edges = generate_edges(log, WeightMode::jaccard, {});
  const double pi = 3.14159265358979323846;
  const double expected[] = {2.0 / pi * std::atan(4.0 / 3.0), 2.0 / pi * std::atan(2.0 / 3.0),
                             0.5};
  v.require(edges.size() == 3, "expected 3 Jaccard edges");
  for (std::size_t i = 0; i < std::min<std::size_t>(3, edges.size()); ++i) {
    v.require(std::abs(edges[i].weight - expected[i]) < 1e-12, "scaled Jaccard weight " +
                                                                  std::to_string(i));
  }

  const auto co = log_from("s\t0\tA\tview\ns\t0\tB\tpurchase\n");
  CooccurrenceConfig cfg;
  cfg.reference_time = 86400;
  v.require(cooccurrence_weights(co, cfg).at({"A", "B"}) == 4.0, "Rec=1 score != 4");
  cfg.reference_time = 10 * 86400;
  v.require(cooccurrence_weights(co, cfg).at({"A", "B"}) == 0.4, "Rec=10 score != 0.4");
  const auto co2 = log_from("s\t0\tA\tadd_to_cart\ns\t0\tB\tpurchase\nt\t0\tA\tview\nt\t0\tB\tview\n");
  cfg.reference_time = 86400;
  v.require(cooccurrence_weights(co2, cfg).at({"A", "B"}) == 2.0 * 4.0 + 1.0,
            "two-session score != 9");
  if (v.pass) v.detail = "Jaccard 2/3, 1/3, 1/2; co-occurrence 4, 0.4, 9";
  return v;
}

// 5. Path weights.

Verdict path_weights() {
  Verdict v;
  const auto edges = fixtures::random_edges(200, 600, 501);
  const auto g = build_graph(edges);
  std::map<std::pair<NodeId, NodeId>, double> weight;
  for (const auto& e : edges) {
    const auto a = *g.find(e.src), b = *g.find(e.dst);
    weight[{a, b}] = weight[{b, a}] = e.weight;
  }
  const NeighborSampler sampler(g, 1.0);
  WalkConfig cfg;
  cfg.seed = 502;
  cfg.walks_per_node = 10;
  cfg.walk_length = 5;
  cfg.window = 2;
  const auto walks = generate_walks(sampler, cfg);
  const auto pairs = positive_pairs(sampler, cfg);

  std::vector<TrainingPair> brute;
  for (const auto& w : walks) {
    for (std::size_t i = 0; i + 1 < w.nodes.size(); ++i) {
      v.require(w.weights[i] == weight.at({w.nodes[i], w.nodes[i + 1]}), "logged weight mismatch");
    }
    for (std::size_t i = 0; i < w.nodes.size(); ++i) {
      for (std::size_t d = 1; d <= cfg.window && i + d < w.nodes.size(); ++d) {
        if (w.nodes[i] == w.nodes[i + d]) continue;
        double product = 1.0;
        for (std::size_t s = i; s < i + d; ++s) product *= weight.at({w.nodes[s], w.nodes[s + 1]});
        brute.push_back({w.nodes[i], w.nodes[i + d], std::pow(product, 1.0 / double(d))});
      }
    }
  }
  v.require(brute.size() == pairs.size(), "pair counts differ");
  v.require(pairs.size() >= 10000, "fewer than 1e4 pairs");
  Rng rng(503);
  double worst = 0.0;
  for (std::size_t t = 0; t < 10000 && v.pass; ++t) {
    const auto i = rng.below(pairs.size());
    v.require(pairs[i].u == brute[i].u && pairs[i].v == brute[i].v, "pair endpoints differ");
    worst = std::max(worst, std::abs(pairs[i].r - brute[i].r));
  }
  v.require(worst <= 1e-12, "max |r diff| " + fmt(worst));
  if (v.pass) v.detail = "1e4 of " + std::to_string(pairs.size()) + " pairs, max |r diff| " + fmt(worst);
  return v;
}

// 6, 8, 10. Two-block training.

struct TwoBlockRun {
  std::vector<double> losses;
  double margin = 0.0;
  Embeddings trained;
  Embeddings untrained;
  ModelParams params;
  Hyperparams hp;
  std::size_t input_dim = 0;
  double seconds = 0.0;
};

Hyperparams two_block_hp(double gamma) {
  Hyperparams hp;
  // Uniform sampling leaves the aggregation as the only place the weights
  // act, so the two runs differ in gamma alone.
  hp.alpha = 1.0;
  hp.beta = 0.0;
  hp.gamma = gamma;
  hp.layer_sizes = {10, 5};
  hp.hidden_dims = {32};
  hp.out_dim = 32;
  hp.aggregators = {Aggregator::mean, Aggregator::mean};
  hp.negatives = 5;
  hp.walk.walk_length = 5;
  hp.walk.walks_per_node = 10;
  hp.walk.window = 2;
  hp.learning_rate = 1.0;
  hp.epochs = 10;
  hp.batch_size = 32;
  return hp;
}

TwoBlockRun run_two_block(double gamma) {
  const auto start = std::chrono::steady_clock::now();
  const auto tb = fixtures::two_block(50, 4, 80, 16, 0.2, 601);
  const auto g = build_graph(tb.edges);
  FeatureMatrix f;
  f.primary = tb.features;
  TwoBlockRun run;
  run.hp = two_block_hp(gamma);
  run.input_dim = f.dim();
  const auto result = train(g, f, run.hp, 602);
  run.losses = result.log.epoch_loss;
  run.params = result.params;
  run.trained = embed_all(g, f, result.params, run.hp, 603);
  run.untrained = embed_all(g, f, initial_params(f, run.hp, 602), run.hp, 603);
  run.margin = fixtures::block_margin(run.trained.vectors(), tb).margin();
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

Verdict training_sanity(const TwoBlockRun& weighted, const TwoBlockRun& flat) {
  Verdict v;
  v.require(weighted.losses.size() == 10, "expected 10 epochs");
  if (!v.pass) return v;
  v.require(weighted.losses.back() < weighted.losses.front(),
            "loss " + fmt(weighted.losses.front()) + " -> " + fmt(weighted.losses.back()));
  v.require(weighted.margin >= 0.2, "margin " + fmt(weighted.margin) + " < 0.2");
  v.require(weighted.margin >= flat.margin,
            "gamma=1 margin " + fmt(weighted.margin) + " < gamma~0 margin " + fmt(flat.margin));
  v.require(weighted.seconds < 60.0, "took " + fmt(weighted.seconds) + " s");
  if (v.pass) {
    v.detail = "loss " + fmt(weighted.losses.front()) + " -> " + fmt(weighted.losses.back()) +
               ", margin " + fmt(weighted.margin) + " (gamma~0: " + fmt(flat.margin) + "), " +
               fmt(weighted.seconds) + " s";
  }
  return v;
}

// 7. Metrics.

Embeddings arc(std::size_t n) {
  Eigen::MatrixXd m(2, static_cast<Eigen::Index>(n));
  std::vector<std::string> keys;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 0.3 * static_cast<double>(i);
    m(0, static_cast<Eigen::Index>(i)) = std::cos(t);
    m(1, static_cast<Eigen::Index>(i)) = std::sin(t);
    keys.push_back("i" + std::to_string(i));
  }
  return Embeddings(keys, m);
}

Verdict metric_oracles() {
  Verdict v;
  // Eight points on an arc: from i0 the rank of ix is x, from i7 it is 7-x.
  const auto emb = arc(8);
  const std::vector<TestRecord> records{
      {"i0", {"i1"}},       {"i0", {"i2", "i6"}}, {"i0", {"i6"}},       {"i0", {"i5"}},
      {"i0", {"x9"}},       {"i7", {"i6"}},       {"i7", {"i0", "i3"}}, {"i7", {"i1"}},
      {"i7", {"i2"}},       {"i7", {"i4", "i5"}},
  };
  const auto r = evaluate(emb, records);
  const double mrr5 = (1.0 + 0.5 + 0.0 + 0.2 + 0.0 + 1.0 + 0.25 + 0.0 + 0.2 + 0.5) / 10.0;
  const double mrr25 =
      (1.0 + 0.5 + 1.0 / 6 + 0.2 + 0.0 + 1.0 + 0.25 + 1.0 / 6 + 0.2 + 0.5) / 10.0;
  const double mpr5 = 8.0 / 13.0;
  const double mpr25 = 61.0 / 325.0;
  const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-15; };
  v.require(r.records == 10, "record count");
  v.require(r.view_rate == 0.7, "view rate " + fmt(r.view_rate));
  v.require(close(r.mrr_5, mrr5), "MRR@5 " + fmt(r.mrr_5));
  v.require(close(r.mrr_25, mrr25), "MRR@25 " + fmt(r.mrr_25));
  v.require(close(r.mpr_5, mpr5), "MPR@5 " + fmt(r.mpr_5));
  v.require(close(r.mpr_25, mpr25), "MPR@25 " + fmt(r.mpr_25));

  const std::vector<TestRecord> perfect{{"i0", {"i1"}}, {"i7", {"i6"}}, {"i3", {"i4"}}};
  const auto p = evaluate(arc(8), std::span(perfect).first(2));
  v.require(p.view_rate == 1.0 && p.mrr_5 == 1.0 && p.mpr_5 == 0.0, "perfect recommender");

  Rng rng(701);
  for (int t = 0; t < 100; ++t) {
    Eigen::MatrixXd m = fixtures::random_features(4, 40, 702 + static_cast<std::uint64_t>(t));
    m.colwise().normalize();
    std::vector<std::string> keys;
    for (std::size_t i = 0; i < 40; ++i) keys.push_back(fixtures::key(i));
    const Embeddings e(keys, m);
    std::vector<TestRecord> recs;
    for (int i = 0; i < 20; ++i) {
      const auto seed = rng.below(40);
      auto view = rng.below(40);
      if (view == seed) view = (view + 1) % 40;
      recs.push_back({fixtures::key(seed), {fixtures::key(view)}});
    }
    const auto q = evaluate(e, recs);
    v.require(q.mrr_25 >= q.mrr_5, "MRR@25 < MRR@5 on random fixture " + std::to_string(t));
  }
  if (v.pass) v.detail = "10-record fixture exact, perfect (1, 1, 0), 100 random fixtures";
  return v;
}

// 8. Normalization.

Verdict normalization(const std::vector<const TwoBlockRun*>& runs, const fs::path& cli_dir) {
  Verdict v;
  double worst = 0.0;
  std::size_t rows = 0;
  const auto check_rows = [&](const Embeddings& e) {
    for (NodeId i = 0; i < e.size(); ++i, ++rows) {
      worst = std::max(worst, std::abs(e.vector(i).norm() - 1.0));
    }
  };
  for (const auto* run : runs) {
    check_rows(run->trained);
    check_rows(run->untrained);
    std::stringstream s;
    write_checkpoint(s, Checkpoint{run->hp, run->input_dim, 0, run->params});
    const auto text = s.str();
    v.require(text.find("nan") == std::string::npos && text.find("inf") == std::string::npos,
              "non-finite token in checkpoint");
    v.require(read_checkpoint(s).params.all_finite(), "non-finite checkpoint entry");
  }
  std::ifstream in(cli_dir / "embeddings.tsv");
  const auto cli = read_embeddings(in);
  check_rows(cli);
  std::ifstream ck(cli_dir / "checkpoint.tsv");
  v.require(read_checkpoint(ck).params.all_finite(), "non-finite CLI checkpoint");
  v.require(worst <= 1e-6, "norm deviation " + fmt(worst));
  if (v.pass) v.detail = std::to_string(rows) + " rows, max |norm - 1| " + fmt(worst);
  return v;
}

// 9. CLI determinism.

int invoke(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"swag"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

std::string data_section(const fs::path& p) {
  const auto text = fixtures::read_file(p);
  return text.substr(std::min(text.size(), text.find('\n') + 1));
}

Verdict determinism(const fs::path& root) {
  Verdict v;
  fixtures::write_dataset(root / "data", 60, 400, 901);
  {
    std::ofstream cfg(root / "data" / "run.cfg");
    cfg << "sessions = " << (root / "data" / "sessions.tsv").string() << '\n'
        << "features = " << (root / "data" / "features.tsv").string() << '\n'
        << "test_records = " << (root / "data" / "test.tsv").string() << '\n'
        << "layer_sizes = 5,3\nhidden_dims = 16\nout_dim = 16\nwalks_per_node = 4\n"
        << "epochs = 3\nlearning_rate = 0.1\nhist_pairs = 2000\nsweep.trials = 3\n";
  }
  const auto run_all = [&](const std::string& name, const std::string& workers) {
    const auto out = (root / name).string();
    for (const char* cmd : {"build-graph", "train", "embed", "evaluate", "sweep"}) {
      v.require(invoke({"--config", (root / "data" / "run.cfg").string(), "--seed", "7", "--out",
                        out, "--set", "workers=" + workers, cmd}) == 0,
                std::string(cmd) + " failed");
    }
    v.require(invoke({"--config", (root / "data" / "run.cfg").string(), "--seed", "7", "--out",
                      out, "--set", "workers=" + workers, "recommend", "-q", "i000", "-q",
                      "i013", "--k", "5"}) == 0,
              "recommend failed");
  };
  run_all("run_a", "1");
  run_all("run_b", "1");
  run_all("run_c", "2");
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "run_a")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), root / "run_a");
    const auto a = fixtures::read_file(entry.path());
    v.require(a == fixtures::read_file(root / "run_b" / rel), rel.string() + " differs on rerun");
    v.require(data_section(entry.path()) == data_section(root / "run_c" / rel),
              rel.string() + " differs with 2 workers");
    ++compared;
  }
  v.require(compared >= 15, "too few artifacts");
  if (v.pass) {
    v.detail = std::to_string(compared) + " artifacts identical across reruns and 1 vs 2 workers";
  }
  return v;
}

// 10. Similarity spread.

Verdict spread(const TwoBlockRun& run) {
  Verdict v;
  Rng a(1001), b(1001);
  const auto trained = cosine_histogram(run.trained, 20000, 40, a);
  const auto untrained = cosine_histogram(run.untrained, 20000, 40, b);
  v.require(trained.spread > untrained.spread,
            "trained " + fmt(trained.spread) + " <= untrained " + fmt(untrained.spread));
  if (v.pass) {
    v.detail = "spread " + fmt(untrained.spread) + " untrained -> " + fmt(trained.spread) + " trained";
  }
  return v;
}

}  // namespace

int main() {
  bool all = true;
  std::map<int, std::string> lines;
  const auto report = [&](int id, const char* name, const std::function<Verdict()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && v.pass;
    std::ostringstream line;
    line << (v.pass ? "PASS" : "FAIL") << " criterion " << id << " " << name << ": " << v.detail
         << " [" << fmt(s) << " s]";
    lines[id] = line.str();
    std::cerr << line.str() << std::endl;
  };

  const auto root = fs::temp_directory_path() / "swag_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);

  report(1, "reduction", reduction);
  report(2, "gradients", gradients);
  report(3, "sampling-law", sampling_law);
  report(4, "weight-oracles", weight_oracles);
  report(5, "path-weights", path_weights);

  TwoBlockRun weighted, flat;
  bool trained = false;
  report(6, "training", [&] {
    weighted = run_two_block(1.0);
    flat = run_two_block(1e-6);
    trained = true;
    return training_sanity(weighted, flat);
  });
  report(7, "metrics", metric_oracles);
  report(9, "determinism", [&] { return determinism(root); });
  report(8, "normalization", [&] {
    if (!trained) return Verdict{false, "two-block training did not run"};
    return normalization({&weighted, &flat}, root / "run_a");
  });
  report(10, "spread", [&] {
    if (!trained) return Verdict{false, "two-block training did not run"};
    return spread(weighted);
  });

  for (const auto& [id, line] : lines) std::cout << line << '\n';
  std::cout << (all ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
  return all ? 0 : 1;
}

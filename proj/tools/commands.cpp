#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "swag/error.hpp"
#include "swag/eval.hpp"
#include "swag/graph.hpp"
#include "swag/io.hpp"
#include "swag/text.hpp"
#include "swag/train.hpp"
#include "swag/weight_gen.hpp"

namespace swag::cli {

namespace {

enum : std::uint64_t { kHistogramStream = 11, kSweepDrawStream = 12, kSweepTrialStream = 13 };

constexpr double kSweepLow = 1e-6;
constexpr double kSweepHigh = 10.0;

std::filesystem::path input_path(const Context& ctx, const char* key, const char* fallback) {
  if (ctx.cfg.is_set(key)) return ctx.cfg.text(key);
  if (fallback == nullptr) throw ConfigError("config key '" + std::string(key) + "' is required");
  return ctx.out_dir / fallback;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return in;
}

// Writes `body` under the provenance header, replacing the file atomically
// enough for single-process use.
void write_artifact(const Context& ctx, const std::filesystem::path& path,
                    const std::string& command, const std::string& body) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write '" + path.string() + "'");
  file << artifact_header(command, ctx.cfg.seed(), ctx.cfg.hash()) << body;
  if (!file.flush()) throw IoError("write failed for '" + path.string() + "'");
}

// JSON cannot carry a comment line, so the header goes in a leading field.
void write_json_artifact(const Context& ctx, const std::filesystem::path& path,
                         const std::string& command, const std::string& body) {
  auto header = artifact_header(command, ctx.cfg.seed(), ctx.cfg.hash());
  header = header.substr(2, header.size() - 3);
  nlohmann::ordered_json j = {{"provenance", header}};
  const auto parsed = nlohmann::ordered_json::parse(body);
  for (const auto& [k, v] : parsed.items()) j[k] = v;
  std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write '" + path.string() + "'");
  file << j.dump(2) << '\n';
  if (!file.flush()) throw IoError("write failed for '" + path.string() + "'");
}

void say(const Context& ctx, const std::string& line) {
  if (ctx.out != nullptr) *ctx.out << line << '\n';
}

struct Inputs {
  WeightedGraph graph;
  FeatureMatrix features;
};

FeatureTable load_feature_table(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_features(in);
  } catch (const InputError& e) {
    throw InputError(path.filename().string() + ": " + e.what());
  }
}

// Graph over the edge file plus every node that has a feature row, so
// feature-only nodes are embedded inductively.
Inputs load_inputs(const Context& ctx) {
  const auto table = load_feature_table(input_path(ctx, "features", nullptr));
  auto edges_in = open_input(input_path(ctx, "edges", "edges.tsv"));
  const auto edges = read_edges(edges_in);

  Inputs inputs;
  inputs.graph = build_graph(edges, table.keys);
  inputs.features.primary = align_features(table, inputs.graph);
  if (ctx.cfg.is_set("features_secondary")) {
    const auto second = load_feature_table(ctx.cfg.text("features_secondary"));
    inputs.features.secondary = align_features(second, inputs.graph);
  }
  return inputs;
}

Embeddings load_embeddings(const Context& ctx) {
  auto in = open_input(input_path(ctx, "embeddings", "embeddings.tsv"));
  return read_embeddings(in);
}

std::string train_log_csv(const TrainingLog& log) {
  std::ostringstream s;
  s << "epoch,loss,pairs\n";
  for (std::size_t e = 0; e < log.epoch_loss.size(); ++e) {
    s << e + 1 << ',' << format_double(log.epoch_loss[e]) << ',' << log.epoch_pairs[e] << '\n';
  }
  return s.str();
}

std::string checkpoint_text(const Hyperparams& hp, const FeatureMatrix& f, const ModelParams& p) {
  std::ostringstream s;
  write_checkpoint(s, Checkpoint{hp, f.dim(), f.secondary_dim(), p});
  return s.str();
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), ',', ';');
  return s;
}

struct Trial {
  std::size_t id = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  bool ok = false;
  std::string note;
  EvalReport report;
  double final_loss = 0.0;
};

std::vector<Trial> sweep_trials(const RunConfig& cfg) {
  const auto count = cfg.count("sweep.trials");
  if (count == 0) throw ConfigError("sweep.trials must be >= 1");
  std::vector<Trial> trials;
  if (cfg.flag("sweep.include_baseline")) trials.push_back(Trial{});
  Rng rng(derive_seed(cfg.seed(), kSweepDrawStream));
  const double lo = std::log(kSweepLow);
  const double hi = std::log(kSweepHigh);
  for (std::size_t t = 1; t <= count; ++t) {
    Trial trial;
    trial.id = t;
    trial.alpha = std::exp(rng.uniform(lo, hi));
    trial.beta = std::exp(rng.uniform(lo, hi));
    trial.gamma = std::exp(rng.uniform(lo, hi));
    trials.push_back(trial);
  }
  return trials;
}

std::string trial_name(std::size_t id) {
  std::string digits = std::to_string(id);
  return "trial_" + std::string(digits.size() < 3 ? 3 - digits.size() : 0, '0') + digits;
}

}  // namespace

void cmd_build_graph(const Context& ctx) {
  const auto path = input_path(ctx, "sessions", nullptr);
  auto in = open_input(path);
  const auto log = parse_sessions(in);
  if (log.empty()) throw InputError("session file '" + path.string() + "' has no valid events");

  const auto mode = *parse_weight_mode(ctx.cfg.text("weight_mode"));
  const auto edges = generate_edges(log, mode, cooccurrence_config(ctx.cfg));
  std::vector<std::string> items;
  for (const auto& s : log.sessions) {
    for (const auto& [item, action] : s.items) items.push_back(item);
  }
  const auto g = build_graph(edges, items);
  const auto diag = validate(g);

  std::ostringstream e, n, d;
  write_edges(e, g);
  write_node_table(n, g);
  write_diagnostics(d, diag);
  d << "sessions=" << log.sessions.size() << '\n'
    << "events=" << log.event_count << '\n'
    << "rejected_lines=" << log.rejected_lines << '\n';
  write_artifact(ctx, ctx.out_dir / "edges.tsv", "build-graph", e.str());
  write_artifact(ctx, ctx.out_dir / "nodes.tsv", "build-graph", n.str());
  write_artifact(ctx, ctx.out_dir / "diagnostics.txt", "build-graph", d.str());
  if (ctx.out != nullptr) *ctx.out << d.str();
}

void cmd_train(const Context& ctx) {
  const auto inputs = load_inputs(ctx);
  const auto hp = hyperparams(ctx.cfg);
  const auto result = train(inputs.graph, inputs.features, hp, ctx.cfg.seed(),
                            [&ctx](std::size_t epoch, double loss) {
                              say(ctx, "epoch " + std::to_string(epoch + 1) +
                                           " loss " + format_double(loss));
                            });
  write_artifact(ctx, ctx.out_dir / "checkpoint.tsv", "train",
                 checkpoint_text(hp, inputs.features, result.params));
  write_artifact(ctx, ctx.out_dir / "train_log.csv", "train", train_log_csv(result.log));
}

void cmd_embed(const Context& ctx) {
  auto in = open_input(input_path(ctx, "checkpoint", "checkpoint.tsv"));
  auto ckpt = read_checkpoint(in);
  const auto inputs = load_inputs(ctx);
  if (inputs.features.dim() != ckpt.input_dim ||
      inputs.features.secondary_dim() != ckpt.secondary_dim) {
    throw ShapeError("feature widths (" + std::to_string(inputs.features.dim()) + ", " +
                     std::to_string(inputs.features.secondary_dim()) +
                     ") do not match the checkpoint (" + std::to_string(ckpt.input_dim) + ", " +
                     std::to_string(ckpt.secondary_dim) + ")");
  }
  ckpt.hp.workers = std::max<std::size_t>(1, ctx.cfg.count("workers"));
  const auto emb = embed_all(inputs.graph, inputs.features, ckpt.params, ckpt.hp, ctx.cfg.seed());
  std::ostringstream s;
  write_embeddings(s, emb);
  write_artifact(ctx, ctx.out_dir / "embeddings.tsv", "embed", s.str());
  say(ctx, "embedded " + std::to_string(emb.size()) + " nodes, dim " + std::to_string(emb.dim()));
}

void cmd_recommend(const Context& ctx, const std::vector<std::string>& queries,
                   std::optional<std::size_t> k) {
  if (queries.empty()) throw ConfigError("recommend needs at least one --query");
  const auto emb = load_embeddings(ctx);
  const auto depth = k.value_or(ctx.cfg.count("k"));
  if (depth == 0) throw ConfigError("k must be >= 1");
  std::ostringstream s;
  s << "query\trank\titem\tscore\n";
  for (const auto& q : queries) {
    const auto recs = knn(emb, q, depth);
    for (std::size_t i = 0; i < recs.items.size(); ++i) {
      s << q << '\t' << i + 1 << '\t' << emb.key(recs.items[i].id) << '\t'
        << format_double(recs.items[i].score) << '\n';
    }
  }
  write_artifact(ctx, ctx.out_dir / "recommendations.tsv", "recommend", s.str());
  if (ctx.out != nullptr) *ctx.out << s.str();
}

void cmd_evaluate(const Context& ctx) {
  const auto emb = load_embeddings(ctx);
  auto in = open_input(input_path(ctx, "test_records", nullptr));
  const auto records = read_test_records(in);
  const auto report = evaluate(emb, records.records, ctx.cfg.count("top_n"),
                               std::max<std::size_t>(1, ctx.cfg.count("workers")));

  Rng rng(derive_seed(ctx.cfg.seed(), kHistogramStream));
  const auto hist = cosine_histogram(emb, ctx.cfg.count("hist_pairs"), ctx.cfg.count("hist_bins"), rng);

  std::ostringstream text, json, csv;
  write_report(text, report);
  text << "rejected_records=" << records.rejected << '\n'
       << "cosine_mean=" << format_double(hist.mean) << '\n'
       << "cosine_spread=" << format_double(hist.spread) << '\n';
  write_report_json(json, report);
  write_histogram_csv(csv, hist);
  write_artifact(ctx, ctx.out_dir / "report.txt", "evaluate", text.str());
  write_json_artifact(ctx, ctx.out_dir / "report.json", "evaluate", json.str());
  write_artifact(ctx, ctx.out_dir / "cosine_hist.csv", "evaluate", csv.str());
  if (ctx.out != nullptr) *ctx.out << text.str();
}

void cmd_sweep(const Context& ctx) {
  const auto inputs = load_inputs(ctx);
  auto test_in = open_input(input_path(ctx, "test_records", nullptr));
  const auto records = read_test_records(test_in);
  const auto base = hyperparams(ctx.cfg);
  const auto top_n = ctx.cfg.count("top_n");
  auto trials = sweep_trials(ctx.cfg);

  const auto run_trial = [&](Trial& t) {
    Hyperparams hp = base;
    hp.alpha = t.alpha;
    hp.beta = t.beta;
    hp.gamma = t.gamma;
    hp.workers = 1;
    const auto seed = derive_seed(derive_seed(ctx.cfg.seed(), kSweepTrialStream), t.id);
    const auto dir = ctx.out_dir / "trials" / trial_name(t.id);
    try {
      const auto result = train(inputs.graph, inputs.features, hp, seed);
      const auto emb = embed_all(inputs.graph, inputs.features, result.params, hp, seed);
      t.report = evaluate(emb, records.records, top_n);
      t.final_loss = result.log.epoch_loss.empty() ? 0.0 : result.log.epoch_loss.back();
      t.ok = true;
      std::ostringstream report;
      write_report(report, t.report);
      write_artifact(ctx, dir / "checkpoint.tsv", "sweep",
                     checkpoint_text(hp, inputs.features, result.params));
      write_artifact(ctx, dir / "train_log.csv", "sweep", train_log_csv(result.log));
      write_artifact(ctx, dir / "report.txt", "sweep", report.str());
    } catch (const Error& e) {
      t.ok = false;
      t.note = one_line(e.kind() + ": " + e.what());
      write_artifact(ctx, dir / "report.txt", "sweep", "status=failed\nreason=" + t.note + "\n");
    }
  };

  const auto workers = std::clamp<std::size_t>(ctx.cfg.count("workers"), 1, trials.size());
  if (workers == 1) {
    for (auto& t : trials) run_trial(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (auto i = next.fetch_add(1); i < trials.size(); i = next.fetch_add(1)) {
          run_trial(trials[i]);
        }
      });
    }
  }

  std::sort(trials.begin(), trials.end(), [](const Trial& a, const Trial& b) {
    if (a.ok != b.ok) return a.ok;
    if (a.ok && a.report.view_rate != b.report.view_rate) {
      return a.report.view_rate > b.report.view_rate;
    }
    return a.id < b.id;
  });

  std::ostringstream s;
  s << "rank,trial,status,alpha,beta,gamma,view_rate,mrr@5,mrr@25,mpr@5,mpr@25,final_loss,note\n";
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    s << i + 1 << ',' << trial_name(t.id) << ',' << (t.ok ? "ok" : "failed") << ','
      << format_double(t.alpha) << ',' << format_double(t.beta) << ',' << format_double(t.gamma);
    if (t.ok) {
      s << ',' << format_double(t.report.view_rate) << ',' << format_double(t.report.mrr_5) << ','
        << format_double(t.report.mrr_25) << ',' << format_double(t.report.mpr_5) << ','
        << format_double(t.report.mpr_25) << ',' << format_double(t.final_loss) << ',';
    } else {
      s << ",,,,,,," << t.note;
    }
    s << '\n';
  }
  write_artifact(ctx, ctx.out_dir / "sweep.csv", "sweep", s.str());
  if (ctx.out != nullptr) *ctx.out << s.str();
}

}  // namespace swag::cli

#include <ostream>

#include "CLI11.hpp"

#include "commands.hpp"
#include "swag/error.hpp"

namespace swag::cli {

namespace {

std::string single_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted graph embeddings: build, train, embed, recommend, evaluate, sweep."};
  app.name("swag");
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--set", overrides, "config override key=value (repeatable; wins over --config)");

  auto* build = app.add_subcommand("build-graph", "session log -> weighted edge list");
  auto* train = app.add_subcommand("train", "train model parameters");
  auto* embed = app.add_subcommand("embed", "embed every node with a checkpoint");
  auto* recommend = app.add_subcommand("recommend", "nearest neighbors of query items");
  auto* evaluate = app.add_subcommand("evaluate", "offline metrics and similarity histogram");
  auto* sweep = app.add_subcommand("sweep", "random search over alpha, beta, gamma");

  std::vector<std::string> queries;
  std::optional<std::size_t> k;
  recommend->add_option("--query,-q", queries, "query item key (repeatable)");
  recommend->add_option("--k", k, "neighbors per query");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << single_line(e.what()) << '\n';
    return 2;
  }

  try {
    Context ctx;
    if (!config_path.empty()) ctx.cfg.load_file(config_path);
    for (const auto& o : overrides) ctx.cfg.set_assignment(o);
    if (seed) ctx.cfg.set("seed", std::to_string(*seed));
    ctx.out_dir = out_dir;
    ctx.out = &out;

    if (build->parsed()) cmd_build_graph(ctx);
    if (train->parsed()) cmd_train(ctx);
    if (embed->parsed()) cmd_embed(ctx);
    if (recommend->parsed()) cmd_recommend(ctx, queries, k);
    if (evaluate->parsed()) cmd_evaluate(ctx);
    if (sweep->parsed()) cmd_sweep(ctx);
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << single_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << single_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}

}  // namespace swag::cli

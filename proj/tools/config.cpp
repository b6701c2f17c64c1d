#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "swag/error.hpp"
#include "swag/text.hpp"

namespace swag::cli {

namespace {

enum class Kind { text, real, count, seed, counts, choice, optional_int, flag };

struct KeySpec {
  const char* key;
  Kind kind;
  const char* fallback;
  std::vector<std::string_view> choices = {};
};

// Declaration order is the order of `entries()` and of the hash input.
const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> keys = {
      {"seed", Kind::seed, "0"},
      {"workers", Kind::count, "1"},
      // inputs; empty means the artifact of the previous stage under --out
      {"sessions", Kind::text, ""},
      {"edges", Kind::text, ""},
      {"features", Kind::text, ""},
      {"features_secondary", Kind::text, ""},
      {"test_records", Kind::text, ""},
      {"checkpoint", Kind::text, ""},
      {"embeddings", Kind::text, ""},
      // weight generation
      {"weight_mode", Kind::choice, "jaccard", {"jaccard", "cooccurrence"}},
      {"action_weight.view", Kind::real, "1"},
      {"action_weight.atc", Kind::real, "2"},
      {"action_weight.purchase", Kind::real, "4"},
      {"recency_unit_seconds", Kind::real, "86400"},
      {"reference_time", Kind::optional_int, ""},
      // sampling and walks
      {"beta", Kind::real, "1"},
      {"layer_sizes", Kind::counts, "10,5"},
      {"walk_length", Kind::count, "5"},
      {"walks_per_node", Kind::count, "10"},
      {"window", Kind::count, "2"},
      {"negatives_q", Kind::count, "5"},
      {"negative_distribution", Kind::choice, "degree075", {"uniform", "degree075"}},
      // model and optimizer
      {"alpha", Kind::real, "1"},
      {"gamma", Kind::real, "1"},
      {"aggregators", Kind::text, "mean"},
      {"hidden_dims", Kind::counts, "128"},
      {"out_dim", Kind::count, "128"},
      {"learning_rate", Kind::real, "0.01"},
      {"epochs", Kind::count, "10"},
      {"batch_size", Kind::count, "64"},
      // evaluation
      {"top_n", Kind::count, "5"},
      {"k", Kind::count, "10"},
      {"hist_pairs", Kind::count, "10000"},
      {"hist_bins", Kind::count, "40"},
      // sweep
      {"sweep.trials", Kind::count, "8"},
      {"sweep.include_baseline", Kind::flag, "true"},
  };
  return keys;
}

const KeySpec& spec_of(std::string_view key) {
  for (const auto& s : schema()) {
    if (key == s.key) return s;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void check_value(const KeySpec& s, std::string_view value) {
  const auto bad = [&](const char* what) {
    throw ConfigError("key '" + std::string(s.key) + "' expects " + what + ", got '" +
                      std::string(value) + "'");
  };
  switch (s.kind) {
    case Kind::text:
      break;
    case Kind::real: {
      const auto v = parse_double(value);
      if (!v || !std::isfinite(*v)) bad("a finite number");
      break;
    }
    case Kind::count:
    case Kind::seed:
      if (!parse_uint(value)) bad("a non-negative integer");
      break;
    case Kind::counts:
      for (const auto part : split(value, ',')) {
        if (!parse_uint(part)) bad("a comma-separated list of non-negative integers");
      }
      break;
    case Kind::choice:
      if (std::find(s.choices.begin(), s.choices.end(), value) == s.choices.end()) {
        std::string options;
        for (const auto c : s.choices) options += (options.empty() ? "" : "|") + std::string(c);
        bad(options.c_str());
      }
      break;
    case Kind::optional_int:
      if (!value.empty() && !parse_int(value)) bad("an integer");
      break;
    case Kind::flag:
      if (value != "true" && value != "false") bad("true|false");
      break;
  }
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& s : schema()) values_.emplace(s.key, s.fallback);
}

void RunConfig::load(std::istream& in) {
  std::string line;
  std::size_t number = 0;
  std::vector<std::string> seen;
  while (std::getline(in, line)) {
    ++number;
    if (is_skippable(line)) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    const auto key = std::string(trim(std::string_view(line).substr(0, eq)));
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw ConfigError("line " + std::to_string(number) + ": key '" + key + "' set twice");
    }
    try {
      set(key, trim(std::string_view(line).substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(number) + ": " + e.what());
    }
    seen.push_back(key);
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  load(in);
}

void RunConfig::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const auto& s = spec_of(key);
  check_value(s, value);
  values_.find(key)->second = std::string(value);
}

bool RunConfig::is_set(std::string_view key) const { return !text(key).empty(); }

const std::string& RunConfig::text(std::string_view key) const {
  spec_of(key);
  return values_.find(key)->second;
}

double RunConfig::real(std::string_view key) const { return *parse_double(text(key)); }

std::size_t RunConfig::count(std::string_view key) const {
  return static_cast<std::size_t>(*parse_uint(text(key)));
}

std::uint64_t RunConfig::seed() const { return *parse_uint(text("seed")); }

std::vector<std::size_t> RunConfig::counts(std::string_view key) const {
  std::vector<std::size_t> out;
  for (const auto part : split(text(key), ',')) {
    out.push_back(static_cast<std::size_t>(*parse_uint(part)));
  }
  return out;
}

bool RunConfig::flag(std::string_view key) const { return text(key) == "true"; }

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& s : schema()) out.emplace_back(s.key, values_.find(s.key)->second);
  return out;
}

std::string RunConfig::hash() const {
  std::string canonical;
  for (const auto& [key, value] : entries()) {
    if (key != "workers") canonical += key + "=" + value + "\n";
  }
  return hex64(fnv1a64(canonical));
}

std::vector<std::string> RunConfig::known_keys() {
  std::vector<std::string> out;
  for (const auto& s : schema()) out.emplace_back(s.key);
  return out;
}

Hyperparams hyperparams(const RunConfig& cfg) {
  Hyperparams hp;
  hp.alpha = cfg.real("alpha");
  hp.beta = cfg.real("beta");
  hp.gamma = cfg.real("gamma");
  hp.layer_sizes = cfg.counts("layer_sizes");
  const auto depth = hp.layer_sizes.size();

  // A single hidden width or aggregator applies to every layer.
  hp.hidden_dims = cfg.counts("hidden_dims");
  if (hp.hidden_dims.size() == 1 && depth > 2) hp.hidden_dims.assign(depth - 1, hp.hidden_dims[0]);
  hp.aggregators.clear();
  for (const auto token : split(cfg.text("aggregators"), ',')) {
    const auto a = parse_aggregator(trim(token));
    if (!a) throw ConfigError("unknown aggregator '" + std::string(trim(token)) + "'");
    hp.aggregators.push_back(*a);
  }
  if (hp.aggregators.size() == 1) hp.aggregators.assign(depth, hp.aggregators[0]);

  hp.out_dim = cfg.count("out_dim");
  hp.negatives = cfg.count("negatives_q");
  hp.negative_distribution = *parse_negative_distribution(cfg.text("negative_distribution"));
  hp.walk.walk_length = cfg.count("walk_length");
  hp.walk.walks_per_node = cfg.count("walks_per_node");
  hp.walk.window = cfg.count("window");
  hp.learning_rate = cfg.real("learning_rate");
  hp.epochs = cfg.count("epochs");
  hp.batch_size = cfg.count("batch_size");
  hp.workers = std::max<std::size_t>(1, cfg.count("workers"));
  hp.check();
  return hp;
}

CooccurrenceConfig cooccurrence_config(const RunConfig& cfg) {
  CooccurrenceConfig c;
  c.view_weight = cfg.real("action_weight.view");
  c.add_to_cart_weight = cfg.real("action_weight.atc");
  c.purchase_weight = cfg.real("action_weight.purchase");
  c.recency_unit_seconds = cfg.real("recency_unit_seconds");
  if (cfg.is_set("reference_time")) c.reference_time = *parse_int(cfg.text("reference_time"));
  c.check();
  return c;
}

}  // namespace swag::cli

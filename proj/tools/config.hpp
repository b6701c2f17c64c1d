#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swag/model.hpp"
#include "swag/weight_gen.hpp"

namespace swag::cli {

// Flat `key = value` run configuration. Every key must appear in the
// schema; values are type-checked when set.
class RunConfig {
 public:
  RunConfig();

  // Reads a config file. Blank lines and '#' comments are ignored; a key may
  // appear once per file.
  void load(std::istream& in);
  void load_file(const std::filesystem::path& path);

  // Parses `key=value` (used for command-line overrides).
  void set_assignment(std::string_view assignment);
  void set(std::string_view key, std::string_view value);

  bool is_set(std::string_view key) const;
  const std::string& text(std::string_view key) const;
  double real(std::string_view key) const;
  std::size_t count(std::string_view key) const;
  std::uint64_t seed() const;
  std::vector<std::size_t> counts(std::string_view key) const;
  bool flag(std::string_view key) const;

  // 16 hex digits over every resolved key=value. `workers` is left out
  // because it never changes results.
  std::string hash() const;

  // Keys in schema order with their resolved values.
  std::vector<std::pair<std::string, std::string>> entries() const;

  static std::vector<std::string> known_keys();

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

Hyperparams hyperparams(const RunConfig& cfg);
CooccurrenceConfig cooccurrence_config(const RunConfig& cfg);

}  // namespace swag::cli

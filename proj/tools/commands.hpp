#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace swag::cli {

struct Context {
  RunConfig cfg;
  std::filesystem::path out_dir = ".";
  std::ostream* out = nullptr;  // human-readable progress and summaries
};

void cmd_build_graph(const Context& ctx);
void cmd_train(const Context& ctx);
void cmd_embed(const Context& ctx);
void cmd_recommend(const Context& ctx, const std::vector<std::string>& queries,
                   std::optional<std::size_t> k);
void cmd_evaluate(const Context& ctx);
void cmd_sweep(const Context& ctx);

// Parses argv and dispatches. Returns the process exit code: 0 on success,
// 1 on a runtime error, 2 on a usage error. Errors are reported as a single
// `error: <kind>: <message>` line on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace swag::cli

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sladr/config.hpp"
#include "sladr/error.hpp"

namespace sladr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolver = 1;
inline constexpr int kExitUsage = 2;

/// Bad flags or config values; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct BenchRequest {
  std::vector<std::string> suites;    // may contain "paper-all"
  std::vector<std::string> variants;  // empty: each suite's default methods, one CSV per suite
  std::optional<std::string> out;
  std::string cache_dir;
  bool verbose = false;
};

/// --out, else $SLADR_OUT, else the current directory.
std::string output_dir(const std::optional<std::string>& flag);

/// Fills defaults and checks a run config without running it.
RunConfig effective_config(const RunConfig& cfg);

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchRequest& req, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to the subcommands.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sladr::cli

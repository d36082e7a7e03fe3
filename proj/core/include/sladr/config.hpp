#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sladr {

/// Settings of a single run. Every field is optional so that a config file
/// and command-line flags can be layered; unset fields take defaults when
/// the run is resolved.
struct RunConfig {
  std::optional<std::string> problem;
  std::optional<std::string> scheme;  // sl1, sl2, sl2s
  std::optional<double> theta;
  std::optional<double> dx;
  std::optional<std::string> mesh;  // mesh file path
  std::optional<double> dt;
  std::optional<std::size_t> steps;
  std::optional<double> mu;
  std::optional<double> lambda;
  std::optional<std::string> interp;  // p1, p2, bicubic
  std::optional<double> ghost_ch;
  std::optional<double> ghost_h;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::vector<double>> checkpoints;

  /// Fields set in `over` replace those here.
  void merge(const RunConfig& over);
  bool operator==(const RunConfig&) const = default;
};

/// Flat `key=value` text; `#` starts a comment, keys match the long flags
/// (`ghost-ch`, `checkpoints=0.5,1`). Throws ParseError with the line number.
RunConfig parse_run_config(std::istream& in);
RunConfig read_run_config(const std::string& path);

/// Set fields only, one per line, in a fixed order.
void write_run_config(std::ostream& out, const RunConfig& cfg);
std::string to_text(const RunConfig& cfg);

/// Parses "0.5,1,2"; throws ParseError on malformed or nonpositive entries.
std::vector<double> parse_number_list(const std::string& text);

/// Strict number parsing for config values and flags.
double parse_double(const std::string& text, const std::string& what);
long long parse_integer(const std::string& text, const std::string& what);

}  // namespace sladr

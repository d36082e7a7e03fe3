#include "sladr/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sladr/error.hpp"
#include "sladr/field_io.hpp"

namespace sladr {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <typename T>
void take(std::optional<T>& dst, const std::optional<T>& src) {
  if (src) dst = src;
}

}  // namespace

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ParseError(what + ": '" + text + "' is not a number");
  }
  return v;
}

long long parse_integer(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  long long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw ParseError(what + ": '" + text + "' is not an integer");
  }
  return v;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const double v = parse_double(item, "checkpoints");
    if (!(v > 0.0)) throw ParseError("checkpoints: times must be positive");
    out.push_back(v);
  }
  if (out.empty()) throw ParseError("checkpoints: empty list");
  return out;
}

void RunConfig::merge(const RunConfig& o) {
  take(problem, o.problem);
  take(scheme, o.scheme);
  take(theta, o.theta);
  take(dx, o.dx);
  take(mesh, o.mesh);
  take(dt, o.dt);
  take(steps, o.steps);
  take(mu, o.mu);
  take(lambda, o.lambda);
  take(interp, o.interp);
  take(ghost_ch, o.ghost_ch);
  take(ghost_h, o.ghost_h);
  take(out, o.out);
  take(threads, o.threads);
  take(checkpoints, o.checkpoints);
}

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(line_no);
    if (eq == std::string::npos) throw ParseError(where + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ParseError(where + ": empty value for '" + key + "'");
    const std::string what = where + " (" + key + ")";
    if (key == "problem") {
      cfg.problem = value;
    } else if (key == "scheme") {
      cfg.scheme = value;
    } else if (key == "theta") {
      cfg.theta = parse_double(value, what);
    } else if (key == "dx") {
      cfg.dx = parse_double(value, what);
    } else if (key == "mesh") {
      cfg.mesh = value;
    } else if (key == "dt") {
      cfg.dt = parse_double(value, what);
    } else if (key == "steps") {
      const long long n = parse_integer(value, what);
      if (n < 0) throw ParseError(what + ": must be >= 0");
      cfg.steps = static_cast<std::size_t>(n);
    } else if (key == "mu") {
      cfg.mu = parse_double(value, what);
    } else if (key == "lambda") {
      cfg.lambda = parse_double(value, what);
    } else if (key == "interp") {
      cfg.interp = value;
    } else if (key == "ghost-ch") {
      cfg.ghost_ch = parse_double(value, what);
    } else if (key == "ghost-h") {
      cfg.ghost_h = parse_double(value, what);
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parse_integer(value, what));
    } else if (key == "checkpoints") {
      cfg.checkpoints = parse_number_list(value);
    } else {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig read_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  return parse_run_config(in);
}

void write_run_config(std::ostream& out, const RunConfig& c) {
  const auto num = [&](const char* key, const std::optional<double>& v) {
    if (v) out << key << '=' << format_double(*v) << '\n';
  };
  const auto str = [&](const char* key, const std::optional<std::string>& v) {
    if (v) out << key << '=' << *v << '\n';
  };
  str("problem", c.problem);
  str("scheme", c.scheme);
  num("theta", c.theta);
  num("dx", c.dx);
  str("mesh", c.mesh);
  num("dt", c.dt);
  if (c.steps) out << "steps=" << *c.steps << '\n';
  num("mu", c.mu);
  num("lambda", c.lambda);
  str("interp", c.interp);
  num("ghost-ch", c.ghost_ch);
  num("ghost-h", c.ghost_h);
  str("out", c.out);
  if (c.threads) out << "threads=" << *c.threads << '\n';
  if (c.checkpoints) {
    out << "checkpoints=";
    for (std::size_t i = 0; i < c.checkpoints->size(); ++i) {
      out << (i ? "," : "") << format_double((*c.checkpoints)[i]);
    }
    out << '\n';
  }
}

std::string to_text(const RunConfig& cfg) {
  std::ostringstream ss;
  write_run_config(ss, cfg);
  return ss.str();
}

}  // namespace sladr

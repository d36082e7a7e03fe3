#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sladr/characteristics.hpp"
#include "sladr/grid_function.hpp"
#include "sladr/interp.hpp"
#include "sladr/mesh.hpp"
#include "sladr/model.hpp"
#include "sladr/oracle.hpp"

namespace sladr {

struct ErrorNorms {
  double l2 = 0.0;
  double linf = 0.0;
};

/// Relative discrete l2 and max errors of c against ref over all dofs and
/// species. Throws when ref vanishes.
ErrorNorms rel_error(const GridFunction& c, const GridFunction& ref);

/// log(e_coarse / e_fine) / log(r).
double conv_rate(double e_coarse, double e_fine, double r);

/// Largest component of u over the dofs at time t.
double max_speed(const VelocityField& u, const Interpolator& interp, double t = 0.0);
inline double courant_number(double dt, double umax, double dx) { return dt * umax / dx; }
inline double parabolic_number(double dt, double nu, double dx) { return dt * nu / (dx * dx); }

// ---------------------------------------------------------------------------
// Time step resolution

/// Exactly one of dt, steps, mu, lambda should be set (> 0); dt wins, then
/// steps, mu, lambda.
struct StepRequest {
  double dt = 0.0;
  std::size_t steps = 0;
  double mu = 0.0;
  double lambda = 0.0;
};

struct StepPlan {
  std::size_t steps = 0;
  double dt = 0.0;            // T / steps
  double requested_dt = 0.0;  // before rounding N
};

/// N = round(T / dt) and dt = T / N. umax is only used for lambda.
StepPlan resolve_steps(const StepRequest& req, double final_time, double dx, double nu, double umax);

// ---------------------------------------------------------------------------
// Discretizations

enum class MeshKind { Structured, TriSquare, Channel, File };
std::string to_string(MeshKind kind);

struct Discretization {
  MeshKind kind = MeshKind::Structured;
  double dx = 0.0;
  std::shared_ptr<const TriMesh> mesh;  // null for structured grids
  std::unique_ptr<Interpolator> interp;
};

/// Structured grids use spacing dx on the problem box. Triangle meshes are
/// generated at target size dx; the channel mesh grades to the hole.
Discretization make_discretization(const ProblemSpec& problem, MeshKind kind, InterpKind interp,
                                   double dx, const std::string& mesh_path = "");

// ---------------------------------------------------------------------------
// Suites

/// Semi-Lagrangian variants plus the explicit Eulerian baselines.
enum class BenchMethod { SL1, SL2, SL2s, FD2RK2, FD4RK3 };
std::string to_string(BenchMethod m);
BenchMethod parse_bench_method(const std::string& text);

struct BenchRow {
  double dx = 0.0;
  StepRequest step;
  double ghost_h = 0.0;  // absolute ghost layer size, 0 for c_h * sqrt(dt)
};

/// Rate of row `fine` measured against row `coarse` with refinement factor r.
struct RatePair {
  std::size_t coarse = 0;
  std::size_t fine = 0;
  double r = 2.0;
};

enum class ReferenceKind { Exact, Oracle };

struct BenchCase {
  std::string problem;  // builtin problem name
  MeshKind mesh = MeshKind::Structured;
  InterpKind interp = InterpKind::Bicubic;
  std::vector<BenchRow> rows;
  std::vector<RatePair> pairs;
  ReferenceKind reference = ReferenceKind::Exact;
  ReferenceOptions oracle;
  double oracle_dx = 0.0;  // 0: finest row dx / oracle.min_space_ratio
  int sl1_substeps = 0;    // 0: Lipschitz default
  int sl2s_substeps = 0;
  double baseline_dt_ratio = 20.0;  // FD baselines step dt / ratio, capped by stability
};

struct Suite {
  std::string name;
  std::vector<BenchMethod> methods;  // default methods
  std::vector<BenchCase> cases;
  bool log_only = false;  // qualitative run log instead of an error table
};

std::vector<std::string> suite_names();
/// Suites written by `bench --suite paper-all`.
std::vector<std::string> standard_suite_names();
/// Throws Error listing the valid names.
Suite builtin_suite(const std::string& name);

struct ErrorRow {
  double dx = 0.0;
  double dt = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  std::optional<double> p2;
  std::optional<double> pinf;
  std::size_t steps = 0;
  std::size_t dofs = 0;
  double seconds = 0.0;
  TrajectoryStats trajectory;
  std::string failure;  // non-empty when the row did not complete

  bool ok() const { return failure.empty(); }
};

struct ErrorReport {
  std::string problem;
  std::string scheme;
  std::string mesh_kind;
  std::string interp;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<ErrorRow> rows;
};

struct BenchOptions {
  std::string cache_dir;  // oracle cache, empty to disable
  bool verbose = false;
  bool keep_going = false;  // record row failures instead of throwing
};

/// Runs every row of `bc` with method m and fills the rate columns.
ErrorReport run_benchmark(const BenchCase& bc, BenchMethod m, const BenchOptions& opts = {});
/// The same for a named problem with the default discretization of its suite.
ErrorReport run_benchmark(const std::string& problem, BenchMethod m, const std::vector<BenchRow>& rows,
                          const BenchOptions& opts = {});

/// Rates for the listed pairs; rows without a pair, or pairs touching a
/// failed row, keep empty rates.
void fill_rates(ErrorReport& report, const std::vector<RatePair>& pairs);

/// `# key=value` metadata, the column header, then completed rows. Several
/// reports are stacked with a blank line between blocks.
void write_report_csv(std::ostream& out, const std::vector<ErrorReport>& reports);

// ---------------------------------------------------------------------------
// Channel run log

struct ChannelSample {
  double t = 0.0;
  double min = 0.0;
  double max = 0.0;
  double front_x = 0.0;  // furthest centerline abscissa behind the hole with c >= 1/2
  std::vector<double> centerline;
};

struct ChannelLog {
  double dx = 0.0;
  double dt = 0.0;
  std::size_t dofs = 0;
  std::vector<double> centerline_x;
  std::vector<ChannelSample> samples;
};

/// Runs nonconvex_channel with SL2 and records the checkpoints.
ChannelLog run_channel(double dx, double dt, const std::vector<double>& checkpoints,
                       BenchMethod m = BenchMethod::SL2);
void write_channel_csv(std::ostream& out, const ChannelLog& log);

}  // namespace sladr

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sladr/boundary.hpp"
#include "sladr/characteristics.hpp"
#include "sladr/grid_function.hpp"
#include "sladr/interp.hpp"
#include "sladr/model.hpp"

namespace sladr {

/// Species count supported by the per-node reaction solver.
inline constexpr std::size_t kMaxSpecies = 16;

/// How the explicit reaction term enters the second-order update.
///  Full:    f is evaluated at every interpolated foot value.
///  Reduced: f is evaluated once, at the weighted foot average.
enum class NonlinearMode { Full, Reduced };

struct ReactionSolverOptions {
  double tolerance = 1e-12;
  int max_iter = 50;
};

struct SchemeConfig {
  SchemeVariant variant = SchemeVariant::SL2;
  double theta = 1.0;  // SL1 only
  double dt = 0.0;
  int substeps = 0;  // 0 selects the Lipschitz-based default
  FixedPointOptions fixed_point;
  ReactionSolverOptions reaction;
  NonlinearMode mode = NonlinearMode::Full;
  double ghost_ch = 1.5;
  double ghost_h = 0.0;  // absolute layer size; overrides ghost_ch when > 0

  void validate() const;
  double ghost_size() const;
};

struct SolverState {
  GridFunction c;
  double t = 0.0;
  std::size_t step = 0;
};

struct StepDiagnostics {
  std::size_t step = 0;
  double t = 0.0;
  std::vector<double> min;
  std::vector<double> max;
  TrajectoryStats trajectory;
  std::uint64_t reaction_iterations = 0;
  std::size_t exterior_feet = 0;
};

/// Solves c - w * f(c) = a for one node (w already includes dt). Returns
/// the Newton iteration count; throws ConvergenceError.
int solve_reaction_implicit(std::span<const double> a, double w, const ReactionTerm& f,
                            std::span<double> c, const ReactionSolverOptions& opts = {});

/// Samples fn(x_i, s) at every dof of `interp`.
GridFunction sample_dofs(const Interpolator& interp, std::size_t species,
                         const std::function<double(Vec2, std::size_t)>& fn);

/// Advances a problem on one discretization. Holds the ghost layer; the
/// problem and interpolator must outlive it.
class Stepper {
 public:
  Stepper(const ProblemSpec& problem, const Interpolator& interp, SchemeConfig config);

  SolverState initial_state() const;
  /// One step from state.t to state.t + dt, in place.
  StepDiagnostics step(SolverState& state) const;

  const SchemeConfig& config() const { return config_; }
  const GhostLayer* ghost_layer() const { return ghost_ ? &*ghost_ : nullptr; }

 private:
  const ProblemSpec& problem_;
  const Interpolator& interp_;
  SchemeConfig config_;
  std::optional<GhostLayer> ghost_;
};

/// One SL1 step (config.variant is forced to SL1).
StepDiagnostics step_sl1(SolverState& state, const ProblemSpec& problem, const Interpolator& interp,
                         SchemeConfig config);
/// One SL2 or SL2s step (config.variant must not be SL1).
StepDiagnostics step_sl2(SolverState& state, const ProblemSpec& problem, const Interpolator& interp,
                         const SchemeConfig& config);

struct RunResult {
  SolverState state;
  std::vector<StepDiagnostics> steps;
  TrajectoryStats trajectory;
};

/// Called after each step with the new state; used for checkpoints.
using StepObserver = std::function<void(const SolverState&, const StepDiagnostics&)>;

/// N steps of config.dt; requires N * dt = T (to 1e-9 relative) unless N = 0.
RunResult run(const ProblemSpec& problem, const SchemeConfig& config, const Interpolator& interp,
              std::size_t n_steps, const StepObserver& observer = {});

}  // namespace sladr

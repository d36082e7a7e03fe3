#include "sladr/schemes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "sladr/error.hpp"
#include "sladr/parallel.hpp"

namespace sladr {

void SchemeConfig::validate() const {
  if (!(dt > 0.0)) throw Error("time step must be positive");
  if (variant == SchemeVariant::SL1 && !(theta >= 0.5 && theta <= 1.0)) {
    throw Error("theta must lie in [1/2, 1]");
  }
  if (substeps < 0) throw Error("substep count must be >= 0");
  if (ghost_h < 0.0 || !(ghost_ch > 0.0)) throw Error("ghost layer parameters must be positive");
}

double SchemeConfig::ghost_size() const {
  return ghost_h > 0.0 ? ghost_h : ghost_layer_size(dt, ghost_ch);
}

// ---------------------------------------------------------------------------
// Reaction solve

int solve_reaction_implicit(std::span<const double> a, double w, const ReactionTerm& f,
                            std::span<double> c, const ReactionSolverOptions& opts) {
  const std::size_t S = a.size();
  if (S == 0 || S > kMaxSpecies || c.size() != S || f.species() != S) {
    throw Error("reaction solve: species count mismatch");
  }
  if (f.is_zero()) {
    std::copy(a.begin(), a.end(), c.begin());
    return 0;
  }
  double a_norm = 0.0;
  for (double v : a) a_norm += v * v;
  a_norm = std::sqrt(a_norm);
  const double target = opts.tolerance * (1.0 + a_norm);

  std::array<double, kMaxSpecies> fc{}, r{}, trial{};
  std::array<double, kMaxSpecies * kMaxSpecies> jac{};
  const auto residual = [&](std::span<const double> x, std::array<double, kMaxSpecies>& out) {
    f.eval(x, std::span<double>(fc.data(), S));
    double n2 = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      out[s] = x[s] - w * fc[s] - a[s];
      n2 += out[s] * out[s];
    }
    return std::sqrt(n2);
  };

  std::copy(a.begin(), a.end(), c.begin());
  double rn = residual(c, r);
  for (int it = 0; it < opts.max_iter; ++it) {
    if (rn <= target) return it;
    f.jacobian(c, std::span<double>(jac.data(), S * S));
    std::array<double, kMaxSpecies> step{};
    if (S == 1) {
      const double d = 1.0 - w * jac[0];
      if (d == 0.0) break;
      step[0] = r[0] / d;
    } else {
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxSpecies, kMaxSpecies> J(S, S);
      Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxSpecies, 1> rhs(S);
      for (std::size_t i = 0; i < S; ++i) {
        rhs(static_cast<Eigen::Index>(i)) = r[i];
        for (std::size_t j = 0; j < S; ++j) {
          J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              (i == j ? 1.0 : 0.0) - w * jac[i * S + j];
        }
      }
      const auto sol = J.partialPivLu().solve(rhs);
      for (std::size_t i = 0; i < S; ++i) step[i] = sol(static_cast<Eigen::Index>(i));
    }
    // damped update: halve until the residual decreases
    double lambda = 1.0;
    double next = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 30; ++k) {
      for (std::size_t s = 0; s < S; ++s) trial[s] = c[s] - lambda * step[s];
      next = residual(std::span<const double>(trial.data(), S), r);
      if (std::isfinite(next) && next < rn) break;
      lambda *= 0.5;
    }
    if (!std::isfinite(next)) break;
    std::copy(trial.begin(), trial.begin() + static_cast<long>(S), c.begin());
    rn = next;
  }
  if (rn <= target) return opts.max_iter;
  throw ConvergenceError("reaction Newton solve did not converge (residual " + std::to_string(rn) +
                             ")",
                         0, rn);
}

GridFunction sample_dofs(const Interpolator& interp, std::size_t species,
                         const std::function<double(Vec2, std::size_t)>& fn) {
  GridFunction c(interp.dof_count(), species);
  for (std::size_t i = 0; i < interp.dof_count(); ++i) {
    const Vec2 x = interp.dof(i);
    for (std::size_t s = 0; s < species; ++s) c(i, s) = fn(x, s);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Stepper

Stepper::Stepper(const ProblemSpec& problem, const Interpolator& interp, SchemeConfig config)
    : problem_(problem), interp_(interp), config_(config) {
  problem_.validate();
  config_.validate();
  if (problem_.species() > kMaxSpecies) throw Error("too many species");
  if (problem_.domain.periodic() != interp_.periodic()) {
    throw Error("problem and mesh disagree on periodicity");
  }
  if (!interp_.periodic()) ghost_ = build_ghost_layer(problem_.domain, config_.ghost_size());
}

SolverState Stepper::initial_state() const {
  SolverState st;
  st.c = sample_dofs(interp_, problem_.species(), problem_.initial);
  return st;
}

StepDiagnostics Stepper::step(SolverState& state) const {
  const SchemeConfig& cfg = config_;
  const std::size_t S = problem_.species();
  const double dt = cfg.dt;
  const double t_n = static_cast<double>(state.step) * dt;
  const double t_np1 = static_cast<double>(state.step + 1) * dt;

  FeetOptions fopts;
  fopts.substeps = cfg.substeps;
  fopts.fixed_point = cfg.fixed_point;
  const FeetTable table =
      build_feet_table(interp_, t_np1, dt, cfg.variant, problem_.velocity, problem_.nu, fopts);

  const std::size_t exterior = interp_.periodic() ? 0 : table.outside_count();
  GhostValues ghost;
  if (exterior > 0) ghost = populate_ghost(*ghost_, state.c, interp_, problem_.boundary, t_n);

  const ReactionTerm& f = problem_.reaction;
  const bool reacting = !f.is_zero();
  const bool first_order = cfg.variant == SchemeVariant::SL1;
  const double implicit_w = first_order ? cfg.theta * dt : 0.5 * dt;
  const double explicit_w = first_order ? (1.0 - cfg.theta) * dt : 0.5 * dt;
  const std::size_t K = table.per_dof;

  const GridFunction& old = state.c;
  GridFunction next(old.n_dofs(), S);
  std::vector<std::uint32_t> newton(old.n_dofs(), 0);

  parallel_for(old.n_dofs(), [&](std::size_t i) {
    double* out = &next(i, 0);
    if (!interp_.periodic() && interp_.is_boundary_dof(i)) {
      const Vec2 x = interp_.dof(i);
      for (std::size_t s = 0; s < S; ++s) out[s] = problem_.boundary(x, t_np1, s);
      return;
    }
    std::array<double, kMaxSpecies> avg{}, rhs{}, foot{}, fv{};
    Stencil st;
    for (std::size_t k = 0; k < K; ++k) {
      const Vec2 z = table.foot(i, k);
      const std::int64_t cell = table.cell[i * K + k];
      if (cell >= 0) {
        interp_.stencil_in_cell(z, cell, st);
        for (std::size_t s = 0; s < S; ++s) foot[s] = st.apply(old, s);
      } else {
        extrapolate_q2(*ghost_, ghost, z, interp_.project(z), std::span<double>(foot.data(), S));
      }
      const double a = table.weights[k];
      for (std::size_t s = 0; s < S; ++s) avg[s] += a * foot[s];
      if (reacting && (first_order || cfg.mode == NonlinearMode::Full)) {
        f.eval(std::span<const double>(foot.data(), S), std::span<double>(fv.data(), S));
        for (std::size_t s = 0; s < S; ++s) rhs[s] += a * fv[s];
      }
    }
    if (!reacting) {
      std::copy(avg.begin(), avg.begin() + static_cast<long>(S), out);
      return;
    }
    if (!first_order && cfg.mode == NonlinearMode::Reduced) {
      f.eval(std::span<const double>(avg.data(), S), std::span<double>(rhs.data(), S));
    }
    for (std::size_t s = 0; s < S; ++s) rhs[s] = avg[s] + explicit_w * rhs[s];
    try {
      newton[i] = static_cast<std::uint32_t>(solve_reaction_implicit(
          std::span<const double>(rhs.data(), S), implicit_w, f, std::span<double>(out, S),
          cfg.reaction));
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " at node " + std::to_string(i), i,
                             e.residual());
    }
  });

  StepDiagnostics diag;
  diag.step = state.step + 1;
  diag.t = t_np1;
  diag.trajectory = table.stats;
  diag.exterior_feet = exterior;
  diag.min.assign(S, std::numeric_limits<double>::infinity());
  diag.max.assign(S, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < next.n_dofs(); ++i) {
    for (std::size_t s = 0; s < S; ++s) {
      const double v = next(i, s);
      if (!std::isfinite(v)) {
        throw Error("non-finite value at dof " + std::to_string(i) + ", species " +
                    std::to_string(s) + ", step " + std::to_string(diag.step));
      }
      diag.min[s] = std::min(diag.min[s], v);
      diag.max[s] = std::max(diag.max[s], v);
    }
    diag.reaction_iterations += newton[i];
  }

  state.c = std::move(next);
  state.step += 1;
  state.t = t_np1;
  return diag;
}

StepDiagnostics step_sl1(SolverState& state, const ProblemSpec& problem, const Interpolator& interp,
                         SchemeConfig config) {
  config.variant = SchemeVariant::SL1;
  return Stepper(problem, interp, config).step(state);
}

StepDiagnostics step_sl2(SolverState& state, const ProblemSpec& problem, const Interpolator& interp,
                         const SchemeConfig& config) {
  if (config.variant == SchemeVariant::SL1) throw Error("step_sl2 needs the sl2 or sl2s variant");
  return Stepper(problem, interp, config).step(state);
}

RunResult run(const ProblemSpec& problem, const SchemeConfig& config, const Interpolator& interp,
              std::size_t n_steps, const StepObserver& observer) {
  const Stepper stepper(problem, interp, config);
  if (n_steps > 0) {
    const double reach = static_cast<double>(n_steps) * config.dt;
    if (std::abs(reach - problem.final_time) > 1e-9 * problem.final_time) {
      throw Error("N * dt = " + std::to_string(reach) + " does not reach T = " +
                  std::to_string(problem.final_time));
    }
  }
  RunResult result;
  result.state = stepper.initial_state();
  result.steps.reserve(n_steps);
  for (std::size_t n = 0; n < n_steps; ++n) {
    StepDiagnostics d = stepper.step(result.state);
    result.trajectory += d.trajectory;
    if (observer) observer(result.state, d);
    result.steps.push_back(std::move(d));
  }
  return result;
}

}  // namespace sladr

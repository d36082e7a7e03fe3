#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sladr/geometry.hpp"
#include "sladr/interp.hpp"
#include "sladr/model.hpp"

namespace sladr {

enum class SchemeVariant { SL1, SL2, SL2s };

std::string to_string(SchemeVariant v);
/// Accepts "sl1", "sl2", "sl2s" (case-insensitive).
SchemeVariant parse_scheme_variant(const std::string& text);

/// Diffusive offsets amplitude * e_k with quadrature weights alpha_k.
struct DisplacementSet {
  int order = 1;
  std::vector<Vec2> directions;  // unit lattice vectors e_k
  std::vector<double> weights;
  double amplitude = 0.0;

  std::size_t size() const { return directions.size(); }
  Vec2 offset(std::size_t k) const { return amplitude * directions[k]; }
};

/// Four points +-delta e_j, delta = sqrt(4 nu dt), weights 1/4.
DisplacementSet first_order_displacements(double nu, double dt);
/// Nine points sqrt(3 dt) sigma e_k with weights 4/9, 1/9 (x4), 1/36 (x4).
DisplacementSet second_order_displacements(double nu, double dt);

/// Work counters; summed over dofs, so they are independent of scheduling.
struct TrajectoryStats {
  std::uint64_t velocity_evals = 0;
  std::uint64_t iterations = 0;

  TrajectoryStats& operator+=(const TrajectoryStats& o) {
    velocity_evals += o.velocity_evals;
    iterations += o.iterations;
    return *this;
  }
  friend bool operator==(const TrajectoryStats&, const TrajectoryStats&) = default;
};

struct FixedPointOptions {
  double tolerance = 1e-12;
  int max_iter = 25;
};

/// m explicit Euler substeps back from x with u frozen at t_n.
Vec2 feet_euler_substep(Vec2 x, double t_n, double dt, int m, const VelocityField& u,
                        TrajectoryStats* stats = nullptr);

/// m trapezoidal substeps back from x starting at t_{n+1}; each implicit
/// substep is solved by fixed point. Throws ConvergenceError.
Vec2 feet_trapezoid_substep(Vec2 x, double t_np1, double dt, int m, const VelocityField& u,
                            const FixedPointOptions& opts = {}, TrajectoryStats* stats = nullptr);

/// Solves z = x - dt/2 (u(x, t_{n+1}) + u(z, t_n)) + offset through the
/// displacement delta = z - x. Throws ConvergenceError with the residual.
Vec2 feet_implicit_second_order(Vec2 x, double t_np1, double dt, const VelocityField& u, Vec2 offset,
                                const FixedPointOptions& opts = {}, TrajectoryStats* stats = nullptr);

/// Same, with offset sqrt(6 nu dt) e_k.
Vec2 feet_implicit_second_order(Vec2 x, double t_np1, double dt, const VelocityField& u, double nu,
                                Vec2 e_k, const FixedPointOptions& opts = {},
                                TrajectoryStats* stats = nullptr);

/// Smallest m with (dt / m) * lipschitz <= 0.5.
int default_substeps(double dt, double lipschitz);

struct FeetOptions {
  int substeps = 0;  // 0 selects default_substeps
  FixedPointOptions fixed_point;
};

/// All feet of one time step: K feet per dof, stored at i * K + k.
struct FeetTable {
  std::size_t n_dofs = 0;
  std::size_t per_dof = 0;
  std::vector<Vec2> feet;          // wrapped on periodic domains
  std::vector<std::int64_t> cell;  // containing cell, -1 when outside
  std::vector<double> weights;     // alpha_k, length per_dof
  TrajectoryStats stats;
  int substeps = 0;

  Vec2 foot(std::size_t i, std::size_t k) const { return feet[i * per_dof + k]; }
  bool outside(std::size_t i, std::size_t k) const { return cell[i * per_dof + k] < 0; }
  std::size_t outside_count() const;
};

/// Builds the feet of every dof of `interp` for the step (t_{n+1} - dt, t_{n+1}].
FeetTable build_feet_table(const Interpolator& interp, double t_np1, double dt,
                           SchemeVariant variant, const VelocityField& u, double nu,
                           const FeetOptions& opts = {});

}  // namespace sladr

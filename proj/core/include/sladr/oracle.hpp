#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sladr/grid_function.hpp"
#include "sladr/interp.hpp"
#include "sladr/mesh.hpp"
#include "sladr/model.hpp"

namespace sladr {

/// Finite-difference weights for the m-th derivative at z on nodes x
/// (Fornberg's recursion).
std::vector<double> fd_weights(double z, std::span<const double> x, int m);

enum class TimeIntegrator { RK2, RK3, RK4 };

struct FDScheme {
  int space_order = 4;  // 2: centered; 4: upwind-biased advection, centered diffusion
  TimeIntegrator time = TimeIntegrator::RK4;
};

/// Method-of-lines solver on a structured grid. Periodic axes wrap; on
/// Dirichlet boundaries the exact solution supplies exterior stencil values
/// when the problem has one, and stencils turn one-sided otherwise.
class FDSolver {
 public:
  FDSolver(const ProblemSpec& problem, StructuredGrid grid, FDScheme scheme);

  const StructuredGrid& grid() const { return grid_; }
  const FDScheme& scheme() const { return scheme_; }
  /// 0.9 * min(dx / max|u|, dx^2 / (4 nu)) over the grid.
  double admissible_dt() const;
  /// Throws StabilityError naming the admissible step.
  void check_stability(double dt) const;

  GridFunction initial() const;
  /// du/dt of the semi-discrete system at time t.
  void rhs(const GridFunction& c, double t, GridFunction& out) const;
  /// One explicit Runge-Kutta step from t to t + dt, in place.
  void step(GridFunction& c, double t, double dt) const;

 private:
  struct Tap {
    int offset;
    long index;  // resolved node index along the axis, -1 when exterior
    double weight;
  };
  using Taps = std::vector<Tap>;

  double ghost(long i, long j, std::size_t s, double t) const;
  void apply_dirichlet(GridFunction& c, double t) const;

  const ProblemSpec& problem_;
  StructuredGrid grid_;
  FDScheme scheme_;
  bool ghost_exact_;
  double max_speed_ = 0.0;
  // per axis and node index: first derivative for u > 0, u < 0, and second derivative
  std::vector<Taps> dx_plus_, dx_minus_, dxx_;
  std::vector<Taps> dy_plus_, dy_minus_, dyy_;
};

/// fd_step: one explicit step of `solver`, returning the new field.
GridFunction fd_step(const FDSolver& solver, const GridFunction& c, double t, double dt);

struct ReferenceOptions {
  FDScheme scheme{4, TimeIntegrator::RK4};
  double min_space_ratio = 4.0;  // dx_ref <= coarse dx / ratio
  double min_time_ratio = 20.0;  // dt_ref <= coarse dt / ratio
  std::string cache_dir;         // empty disables the disk cache
  std::size_t memory_budget = std::size_t{2} << 30;
};

struct Reference {
  StructuredGrid grid;
  GridFunction field;
  double dt = 0.0;
  std::size_t steps = 0;
  bool from_cache = false;
};

/// Fine-grid FD solution at the final time. coarse_dx / coarse_dt, when
/// positive, are checked against the refinement ratios of `opts`.
Reference make_reference(const ProblemSpec& problem, double dx_ref, double dt_ref,
                         const ReferenceOptions& opts = {}, double coarse_dx = 0.0,
                         double coarse_dt = 0.0);

/// Bicubic restriction of the reference onto the dofs of `target`.
GridFunction restrict_reference(const Reference& ref, const Interpolator& target);

/// 64-bit FNV-1a hash, used for cache keys.
std::uint64_t fnv1a(const std::string& text);

}  // namespace sladr

#include "sladr/characteristics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "sladr/error.hpp"
#include "sladr/parallel.hpp"

namespace sladr {

std::string to_string(SchemeVariant v) {
  switch (v) {
    case SchemeVariant::SL1: return "sl1";
    case SchemeVariant::SL2: return "sl2";
    case SchemeVariant::SL2s: return "sl2s";
  }
  return "unknown";
}

SchemeVariant parse_scheme_variant(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (t == "sl1") return SchemeVariant::SL1;
  if (t == "sl2") return SchemeVariant::SL2;
  if (t == "sl2s") return SchemeVariant::SL2s;
  throw Error("unknown scheme '" + text + "'; expected sl1, sl2 or sl2s");
}

DisplacementSet first_order_displacements(double nu, double dt) {
  DisplacementSet d;
  d.order = 1;
  d.directions = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  d.weights.assign(4, 0.25);
  d.amplitude = std::sqrt(4.0 * nu * dt);
  return d;
}

DisplacementSet second_order_displacements(double nu, double dt) {
  DisplacementSet d;
  d.order = 2;
  // smallest weights first so the stored weights sum to exactly 1 in double precision
  d.directions = {{1.0, 1.0},  {1.0, -1.0}, {-1.0, 1.0}, {-1.0, -1.0}, {0.0, 1.0},
                  {0.0, -1.0}, {1.0, 0.0},  {-1.0, 0.0}, {0.0, 0.0}};
  d.weights = {1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 9.0,
               1.0 / 9.0,  1.0 / 9.0,  1.0 / 9.0,  4.0 / 9.0};
  d.amplitude = std::sqrt(3.0 * dt) * std::sqrt(2.0 * nu);
  return d;
}

Vec2 feet_euler_substep(Vec2 x, double t_n, double dt, int m, const VelocityField& u,
                        TrajectoryStats* stats) {
  if (m < 1) throw Error("substep count must be >= 1");
  if (u.is_zero()) return x;
  const double dtau = dt / m;
  Vec2 y = x;
  for (int q = 0; q < m; ++q) y -= dtau * u(y, t_n);
  if (stats) stats->velocity_evals += static_cast<std::uint64_t>(m);
  return y;
}

namespace {

// Solves d = base - h * u(anchor + d, t) by fixed point starting at d0.
Vec2 fixed_point(Vec2 anchor, Vec2 d, Vec2 base, double h, double t, const VelocityField& u,
                 const FixedPointOptions& opts, TrajectoryStats* stats) {
  double change = 0.0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Vec2 next = base - h * u(anchor + d, t);
    change = norm(next - d);
    d = next;
    if (stats) {
      ++stats->velocity_evals;
      ++stats->iterations;
    }
    if (change <= opts.tolerance * (1.0 + norm(d))) return d;
  }
  throw ConvergenceError("trajectory fixed point did not converge in " +
                             std::to_string(opts.max_iter) + " iterations (last update " +
                             std::to_string(change) + ")",
                         0, change);
}

}  // namespace

Vec2 feet_trapezoid_substep(Vec2 x, double t_np1, double dt, int m, const VelocityField& u,
                            const FixedPointOptions& opts, TrajectoryStats* stats) {
  if (m < 1) throw Error("substep count must be >= 1");
  if (u.is_zero()) return x;
  const double dtau = dt / m;
  Vec2 y = x;
  for (int q = 0; q < m; ++q) {
    const double t_q = t_np1 - q * dtau;
    const double t_q1 = t_np1 - (q + 1) * dtau;
    const Vec2 uq = u(y, t_q);
    if (stats) ++stats->velocity_evals;
    const Vec2 base = -0.5 * dtau * uq;
    y = y + fixed_point(y, -dtau * uq, base, 0.5 * dtau, t_q1, u, opts, stats);
  }
  return y;
}

Vec2 feet_implicit_second_order(Vec2 x, double t_np1, double dt, const VelocityField& u, Vec2 offset,
                                const FixedPointOptions& opts, TrajectoryStats* stats) {
  if (u.is_zero()) return x + offset;
  const Vec2 ux = u(x, t_np1);
  if (stats) ++stats->velocity_evals;
  const Vec2 base = -0.5 * dt * ux + offset;
  return x + fixed_point(x, -dt * ux + offset, base, 0.5 * dt, t_np1 - dt, u, opts, stats);
}

Vec2 feet_implicit_second_order(Vec2 x, double t_np1, double dt, const VelocityField& u, double nu,
                                Vec2 e_k, const FixedPointOptions& opts, TrajectoryStats* stats) {
  return feet_implicit_second_order(x, t_np1, dt, u, std::sqrt(6.0 * nu * dt) * e_k, opts, stats);
}

int default_substeps(double dt, double lipschitz) {
  if (!(lipschitz > 0.0)) return 1;
  return std::max(1, static_cast<int>(std::ceil(dt * lipschitz / 0.5 - 1e-12)));
}

std::size_t FeetTable::outside_count() const {
  return static_cast<std::size_t>(std::count_if(cell.begin(), cell.end(),
                                                [](std::int64_t c) { return c < 0; }));
}

FeetTable build_feet_table(const Interpolator& interp, double t_np1, double dt,
                           SchemeVariant variant, const VelocityField& u, double nu,
                           const FeetOptions& opts) {
  if (!(dt > 0.0)) throw Error("time step must be positive");
  const DisplacementSet disp = variant == SchemeVariant::SL1 ? first_order_displacements(nu, dt)
                                                             : second_order_displacements(nu, dt);
  const std::size_t n = interp.dof_count();
  const std::size_t K = disp.size();

  FeetTable table;
  table.n_dofs = n;
  table.per_dof = K;
  table.weights = disp.weights;
  table.feet.resize(n * K);
  table.cell.resize(n * K);
  table.substeps = variant == SchemeVariant::SL2
                       ? 0
                       : (opts.substeps > 0 ? opts.substeps : default_substeps(dt, u.lipschitz()));

  std::vector<TrajectoryStats> per_dof(n);
  parallel_for(n, [&](std::size_t i) {
    const Vec2 x = interp.dof(i);
    TrajectoryStats& st = per_dof[i];
    try {
      Vec2 centre{};
      if (variant == SchemeVariant::SL1) {
        centre = feet_euler_substep(x, t_np1 - dt, dt, table.substeps, u, &st);
      } else if (variant == SchemeVariant::SL2s) {
        centre = feet_trapezoid_substep(x, t_np1, dt, table.substeps, u, opts.fixed_point, &st);
      }
      for (std::size_t k = 0; k < K; ++k) {
        Vec2 z = variant == SchemeVariant::SL2
                     ? feet_implicit_second_order(x, t_np1, dt, u, disp.offset(k), opts.fixed_point,
                                                  &st)
                     : centre + disp.offset(k);
        z = interp.wrap(z);
        table.feet[i * K + k] = z;
        table.cell[i * K + k] = interp.locate(z);
      }
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " at dof " + std::to_string(i), i,
                             e.residual());
    }
  });
  for (const auto& st : per_dof) table.stats += st;
  return table;
}

}  // namespace sladr

#include "sladr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

#include "sladr/error.hpp"
#include "sladr/field_io.hpp"
#include "sladr/parallel.hpp"

namespace sladr {

std::vector<double> fd_weights(double z, std::span<const double> x, int m) {
  const int n = static_cast<int>(x.size()) - 1;
  if (n < m) throw Error("fd_weights: not enough nodes for the derivative order");
  // c[k][j]: weight of node j for derivative k
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c[m];
}

namespace {

// Stencil for node i of an axis with n_nodes nodes. When `wrap_or_ghost` is
// set the window may leave [0, n_nodes); otherwise it is shifted inside.
std::vector<std::pair<int, double>> axis_taps(long i, long n_nodes, int lo, int hi, int deriv,
                                              double h, bool wrap_or_ghost) {
  long a = i + lo;
  long b = i + hi;
  if (!wrap_or_ghost) {
    if (a < 0) {
      b -= a;
      a = 0;
    }
    if (b > n_nodes - 1) {
      a -= b - (n_nodes - 1);
      b = n_nodes - 1;
    }
    a = std::max<long>(a, 0);
  }
  std::vector<double> xs;
  for (long k = a; k <= b; ++k) xs.push_back(static_cast<double>(k - i));
  const auto w = fd_weights(0.0, xs, deriv);
  std::vector<std::pair<int, double>> out;
  const double scale = deriv == 1 ? 1.0 / h : 1.0 / (h * h);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out.emplace_back(static_cast<int>(xs[k]), w[k] * scale);
  }
  return out;
}

}  // namespace

FDSolver::FDSolver(const ProblemSpec& problem, StructuredGrid grid, FDScheme scheme)
    : problem_(problem), grid_(std::move(grid)), scheme_(scheme) {
  problem_.validate();
  if (scheme_.space_order != 2 && scheme_.space_order != 4) {
    throw Error("finite-difference space order must be 2 or 4");
  }
  if (problem_.domain.periodic() != grid_.periodic()) {
    throw Error("finite-difference grid and problem disagree on periodicity");
  }
  ghost_exact_ = problem_.exact.has_value();

  const auto build = [&](std::size_t n_nodes, double h, bool periodic, std::vector<Taps>& plus,
                         std::vector<Taps>& minus, std::vector<Taps>& second) {
    const bool free_window = periodic || ghost_exact_;
    const auto n = static_cast<long>(n_nodes);
    const auto conv = [&](const std::vector<std::pair<int, double>>& taps, long i) {
      Taps out;
      for (auto [o, w] : taps) {
        long idx = i + o;
        if (periodic) idx = ((idx % n) + n) % n;
        if (idx < 0 || idx >= n) idx = -1;
        out.push_back({o, idx, w});
      }
      return out;
    };
    plus.resize(n_nodes);
    minus.resize(n_nodes);
    second.resize(n_nodes);
    for (long i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (scheme_.space_order == 4) {
        plus[k] = conv(axis_taps(i, n, -3, 1, 1, h, free_window), i);
        minus[k] = conv(axis_taps(i, n, -1, 3, 1, h, free_window), i);
        second[k] = conv(axis_taps(i, n, -2, 2, 2, h, free_window), i);
      } else {
        plus[k] = conv(axis_taps(i, n, -1, 1, 1, h, free_window), i);
        minus[k] = plus[k];
        second[k] = conv(axis_taps(i, n, -1, 1, 2, h, free_window), i);
      }
    }
  };
  build(grid_.nodes_x(), grid_.dx(), grid_.periodic_x(), dx_plus_, dx_minus_, dxx_);
  build(grid_.nodes_y(), grid_.dy(), grid_.periodic_y(), dy_plus_, dy_minus_, dyy_);

  for (std::size_t k = 0; k < grid_.node_count(); ++k) {
    max_speed_ = std::max(max_speed_, norm_inf(problem_.velocity(grid_.node(k), 0.0)));
  }
}

double FDSolver::admissible_dt() const {
  const double h = std::min(grid_.dx(), grid_.dy());
  double limit = std::numeric_limits<double>::infinity();
  if (max_speed_ > 0.0) limit = std::min(limit, h / max_speed_);
  if (problem_.nu > 0.0) limit = std::min(limit, h * h / (4.0 * problem_.nu));
  return 0.9 * limit;
}

void FDSolver::check_stability(double dt) const {
  const double limit = admissible_dt();
  if (dt > limit * (1.0 + 1e-12)) {
    throw StabilityError("explicit step dt = " + format_double(dt) +
                             " violates the stability limit; admissible dt <= " +
                             format_double(limit),
                         limit);
  }
}

GridFunction FDSolver::initial() const {
  GridFunction c(grid_.node_count(), problem_.species());
  for (std::size_t k = 0; k < grid_.node_count(); ++k) {
    for (std::size_t s = 0; s < problem_.species(); ++s) c(k, s) = problem_.initial(grid_.node(k), s);
  }
  return c;
}

double FDSolver::ghost(long i, long j, std::size_t s, double t) const {
  const Vec2 p{grid_.bounds().xmin + static_cast<double>(i) * grid_.dx(),
               grid_.bounds().ymin + static_cast<double>(j) * grid_.dy()};
  return (*problem_.exact)(p, t, s);
}

void FDSolver::rhs(const GridFunction& c, double t, GridFunction& out) const {
  const std::size_t S = problem_.species();
  const long nx = static_cast<long>(grid_.nodes_x());
  const long ny = static_cast<long>(grid_.nodes_y());
  const double nu = problem_.nu;
  const ReactionTerm& f = problem_.reaction;
  if (out.n_dofs() != c.n_dofs() || out.n_species() != S) out = GridFunction(c.n_dofs(), S);

  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t jr) {
    const auto j = static_cast<long>(jr);
    std::vector<double> fv(S);
    for (long i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j * nx + i);
      if (!grid_.periodic() && grid_.is_boundary_node(k)) {
        for (std::size_t s = 0; s < S; ++s) out(k, s) = 0.0;
        continue;
      }
      const Vec2 p = grid_.node(k);
      const Vec2 u = problem_.velocity(p, t);
      const Taps& tx = u.x >= 0.0 ? dx_plus_[i] : dx_minus_[i];
      const Taps& ty = u.y >= 0.0 ? dy_plus_[j] : dy_minus_[j];
      if (!f.is_zero()) f.eval(c.at(k), fv);
      for (std::size_t s = 0; s < S; ++s) {
        // taps along x move within row j, taps along y within column i
        const auto at_x = [&](const Tap& tp) {
          return tp.index >= 0 ? c(static_cast<std::size_t>(j * nx + tp.index), s)
                               : ghost(i + tp.offset, j, s, t);
        };
        const auto at_y = [&](const Tap& tp) {
          return tp.index >= 0 ? c(static_cast<std::size_t>(tp.index * nx + i), s)
                               : ghost(i, j + tp.offset, s, t);
        };
        double cx = 0.0, cy = 0.0, lap = 0.0;
        if (u.x != 0.0)
          for (const Tap& tp : tx) cx += tp.weight * at_x(tp);
        if (u.y != 0.0)
          for (const Tap& tp : ty) cy += tp.weight * at_y(tp);
        if (nu != 0.0) {
          for (const Tap& tp : dxx_[i]) lap += tp.weight * at_x(tp);
          for (const Tap& tp : dyy_[j]) lap += tp.weight * at_y(tp);
        }
        out(k, s) = -u.x * cx - u.y * cy + nu * lap + (f.is_zero() ? 0.0 : fv[s]);
      }
    }
  });
}

void FDSolver::apply_dirichlet(GridFunction& c, double t) const {
  if (grid_.periodic()) return;
  for (std::size_t k = 0; k < grid_.node_count(); ++k) {
    if (!grid_.is_boundary_node(k)) continue;
    for (std::size_t s = 0; s < problem_.species(); ++s) c(k, s) = problem_.boundary(grid_.node(k), t, s);
  }
}

void FDSolver::step(GridFunction& c, double t, double dt) const {
  const std::size_t S = problem_.species();
  const std::size_t n = c.n_dofs();
  auto axpy = [](GridFunction& dst, const GridFunction& x, double a, const GridFunction& y) {
    auto& d = dst.values();
    const auto& xv = x.values();
    const auto& yv = y.values();
    for (std::size_t q = 0; q < d.size(); ++q) d[q] = xv[q] + a * yv[q];
  };
  GridFunction k1(n, S), k2(n, S), k3(n, S), k4(n, S), tmp(n, S);
  switch (scheme_.time) {
    case TimeIntegrator::RK2: {  // Heun
      rhs(c, t, k1);
      axpy(tmp, c, dt, k1);
      apply_dirichlet(tmp, t + dt);
      rhs(tmp, t + dt, k2);
      auto& v = c.values();
      for (std::size_t q = 0; q < v.size(); ++q) v[q] += 0.5 * dt * (k1.values()[q] + k2.values()[q]);
      break;
    }
    case TimeIntegrator::RK3: {  // strong-stability-preserving Shu-Osher form
      rhs(c, t, k1);
      axpy(tmp, c, dt, k1);
      apply_dirichlet(tmp, t + dt);
      rhs(tmp, t + dt, k2);
      GridFunction u2(n, S);
      for (std::size_t q = 0; q < u2.values().size(); ++q) {
        u2.values()[q] = 0.75 * c.values()[q] + 0.25 * (tmp.values()[q] + dt * k2.values()[q]);
      }
      apply_dirichlet(u2, t + 0.5 * dt);
      rhs(u2, t + 0.5 * dt, k3);
      auto& v = c.values();
      for (std::size_t q = 0; q < v.size(); ++q) {
        v[q] = v[q] / 3.0 + 2.0 / 3.0 * (u2.values()[q] + dt * k3.values()[q]);
      }
      break;
    }
    case TimeIntegrator::RK4: {
      rhs(c, t, k1);
      axpy(tmp, c, 0.5 * dt, k1);
      apply_dirichlet(tmp, t + 0.5 * dt);
      rhs(tmp, t + 0.5 * dt, k2);
      axpy(tmp, c, 0.5 * dt, k2);
      apply_dirichlet(tmp, t + 0.5 * dt);
      rhs(tmp, t + 0.5 * dt, k3);
      axpy(tmp, c, dt, k3);
      apply_dirichlet(tmp, t + dt);
      rhs(tmp, t + dt, k4);
      auto& v = c.values();
      for (std::size_t q = 0; q < v.size(); ++q) {
        v[q] += dt / 6.0 *
                (k1.values()[q] + 2.0 * k2.values()[q] + 2.0 * k3.values()[q] + k4.values()[q]);
      }
      break;
    }
  }
  apply_dirichlet(c, t + dt);
}

GridFunction fd_step(const FDSolver& solver, const GridFunction& c, double t, double dt) {
  solver.check_stability(dt);
  GridFunction out = c;
  solver.step(out, t, dt);
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

Reference make_reference(const ProblemSpec& problem, double dx_ref, double dt_ref,
                         const ReferenceOptions& opts, double coarse_dx, double coarse_dt) {
  if (!(dx_ref > 0.0) || !(dt_ref > 0.0)) throw Error("reference needs positive dx and dt");
  if (coarse_dx > 0.0 && dx_ref > coarse_dx / opts.min_space_ratio * (1.0 + 1e-12)) {
    throw Error("reference dx must be at most coarse dx / " + format_double(opts.min_space_ratio));
  }
  if (coarse_dt > 0.0 && dt_ref > coarse_dt / opts.min_time_ratio * (1.0 + 1e-12)) {
    throw Error("reference dt must be at most coarse dt / " + format_double(opts.min_time_ratio));
  }
  StructuredGrid grid = StructuredGrid::with_spacing(problem.domain.box, dx_ref, problem.domain.periodic());
  const std::size_t S = problem.species();
  // solution, four stages and two scratch fields
  const std::size_t bytes = grid.node_count() * S * sizeof(double) * 7;
  if (bytes > opts.memory_budget) {
    throw Error("reference grid needs " + std::to_string(bytes >> 20) +
                " MiB, above the memory budget; use a coarser reference grid");
  }
  FDSolver solver(problem, grid, opts.scheme);
  const double step_cap = std::min(dt_ref, solver.admissible_dt());
  const auto n_steps =
      static_cast<std::size_t>(std::ceil(problem.final_time / step_cap - 1e-9));
  const double dt = problem.final_time / static_cast<double>(n_steps);

  Reference ref{grid, {}, dt, n_steps, false};

  std::ostringstream key;
  key.precision(17);
  key << problem.name << '|' << problem.nu << '|' << problem.final_time << '|' << S << '|'
      << grid.nx() << 'x' << grid.ny() << '|' << n_steps << '|' << opts.scheme.space_order << '|'
      << static_cast<int>(opts.scheme.time) << '|' << problem.domain.box.xmin << ','
      << problem.domain.box.xmax << ',' << problem.domain.box.ymin << ',' << problem.domain.box.ymax;
  std::filesystem::path cache_file;
  if (!opts.cache_dir.empty()) {
    char name[40];
    std::snprintf(name, sizeof(name), "ref_%016llx.sladr",
                  static_cast<unsigned long long>(fnv1a(key.str())));
    cache_file = std::filesystem::path(opts.cache_dir) / name;
    if (std::filesystem::exists(cache_file)) {
      try {
        const Raster r = read_raster_file(cache_file.string());
        if (static_cast<std::size_t>(r.nx) == grid.nodes_x() &&
            static_cast<std::size_t>(r.ny) == grid.nodes_y() &&
            static_cast<std::size_t>(r.species) == S) {
          ref.field = from_raster(r);
          ref.from_cache = true;
          return ref;
        }
      } catch (const ParseError&) {
        // fall through and recompute a damaged cache entry
      }
    }
  }

  ref.field = solver.initial();
  for (std::size_t n = 0; n < n_steps; ++n) solver.step(ref.field, static_cast<double>(n) * dt, dt);
  if (!ref.field.all_finite()) throw Error("reference solution became non-finite");

  if (!cache_file.empty()) {
    std::filesystem::create_directories(cache_file.parent_path());
    const auto tmp = cache_file.string() + ".tmp";
    write_raster_file(tmp, to_raster(grid, ref.field));
    std::filesystem::rename(tmp, cache_file);
  }
  return ref;
}

GridFunction restrict_reference(const Reference& ref, const Interpolator& target) {
  const BicubicInterpolator fine(ref.grid);
  const std::size_t S = ref.field.n_species();
  GridFunction out(target.dof_count(), S);
  for (std::size_t i = 0; i < target.dof_count(); ++i) {
    Stencil st;
    if (!fine.stencil(target.dof(i), st)) throw OutsideDomain("target dof outside the reference grid");
    for (std::size_t s = 0; s < S; ++s) out(i, s) = st.apply(ref.field, s);
  }
  return out;
}

}  // namespace sladr

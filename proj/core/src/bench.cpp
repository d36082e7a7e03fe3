#include "sladr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>
#include <ostream>

#include "sladr/error.hpp"
#include "sladr/field_io.hpp"
#include "sladr/schemes.hpp"

namespace sladr {

ErrorNorms rel_error(const GridFunction& c, const GridFunction& ref) {
  if (c.n_dofs() != ref.n_dofs() || c.n_species() != ref.n_species()) {
    throw Error("rel_error: fields live on different dof sets");
  }
  double d2 = 0.0, r2 = 0.0, dmax = 0.0, rmax = 0.0;
  const auto& a = c.values();
  const auto& b = ref.values();
  for (std::size_t q = 0; q < a.size(); ++q) {
    const double d = a[q] - b[q];
    d2 += d * d;
    r2 += b[q] * b[q];
    dmax = std::max(dmax, std::abs(d));
    rmax = std::max(rmax, std::abs(b[q]));
  }
  if (r2 == 0.0 || rmax == 0.0) throw Error("rel_error: reference is identically zero");
  return {std::sqrt(d2 / r2), dmax / rmax};
}

double conv_rate(double e_coarse, double e_fine, double r) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0)) throw Error("conv_rate: errors must be positive");
  if (!(r > 1.0)) throw Error("conv_rate: refinement factor must exceed 1");
  return std::log(e_coarse / e_fine) / std::log(r);
}

double max_speed(const VelocityField& u, const Interpolator& interp, double t) {
  double m = 0.0;
  for (std::size_t i = 0; i < interp.dof_count(); ++i) m = std::max(m, norm_inf(u(interp.dof(i), t)));
  return m;
}

StepPlan resolve_steps(const StepRequest& req, double final_time, double dx, double nu, double umax) {
  if (!(final_time > 0.0)) throw Error("final time must be positive");
  StepPlan plan;
  if (req.dt > 0.0) {
    plan.requested_dt = req.dt;
  } else if (req.steps > 0) {
    plan.requested_dt = final_time / static_cast<double>(req.steps);
  } else if (req.mu > 0.0) {
    if (!(nu > 0.0)) throw Error("--mu needs a problem with nu > 0");
    plan.requested_dt = req.mu * dx * dx / nu;
  } else if (req.lambda > 0.0) {
    if (!(umax > 0.0)) throw Error("--lambda needs a nonzero velocity field");
    plan.requested_dt = req.lambda * dx / umax;
  } else {
    throw Error("no time step given: set dt, steps, mu or lambda");
  }
  const double n = std::round(final_time / plan.requested_dt);
  if (n < 1.0) {
    throw Error("time step " + format_double(plan.requested_dt) + " gives N = 0 steps; T = " +
                format_double(final_time) + " cannot be reached");
  }
  plan.steps = static_cast<std::size_t>(n);
  plan.dt = final_time / n;
  return plan;
}

std::string to_string(MeshKind kind) {
  switch (kind) {
    case MeshKind::Structured: return "structured";
    case MeshKind::TriSquare: return "triangles";
    case MeshKind::Channel: return "channel";
    case MeshKind::File: return "file";
  }
  return "?";
}

Discretization make_discretization(const ProblemSpec& problem, MeshKind kind, InterpKind interp,
                                   double dx, const std::string& mesh_path) {
  if (!(dx > 0.0) && kind != MeshKind::File) throw Error("mesh spacing must be positive");
  Discretization d;
  d.kind = kind;
  d.dx = dx;
  if (kind == MeshKind::Structured) {
    if (interp != InterpKind::Bicubic) throw Error("structured grids use bicubic interpolation");
    d.interp = std::make_unique<BicubicInterpolator>(
        StructuredGrid::with_spacing(problem.domain.box, dx, problem.domain.periodic()));
    return d;
  }
  if (interp != InterpKind::P1 && interp != InterpKind::P2) {
    throw Error("triangle meshes use p1 or p2 interpolation");
  }
  if (problem.domain.periodic()) throw Error("periodic problems need a structured grid");
  switch (kind) {
    case MeshKind::TriSquare:
      if (problem.domain.hole) throw Error("problem has a hole; use the channel mesh");
      d.mesh = std::make_shared<TriMesh>(gen_square_trimesh(problem.domain.box, dx));
      break;
    case MeshKind::Channel: {
      if (!problem.domain.hole) throw Error("channel mesh needs a domain with a hole");
      const Disk hole = *problem.domain.hole;
      const double h_near = std::min(dx, 2.0 * std::numbers::pi * hole.radius / 24.0);
      d.mesh = std::make_shared<TriMesh>(gen_channel_trimesh(problem.domain.box, hole, dx, h_near));
      break;
    }
    case MeshKind::File:
      d.mesh = std::make_shared<TriMesh>(read_trimesh(mesh_path));
      if (!(d.dx > 0.0)) d.dx = d.mesh->max_edge_length();
      break;
    case MeshKind::Structured: break;
  }
  d.interp = std::make_unique<TriInterpolator>(d.mesh, interp == InterpKind::P1 ? 1 : 2);
  return d;
}

std::string to_string(BenchMethod m) {
  switch (m) {
    case BenchMethod::SL1: return "sl1";
    case BenchMethod::SL2: return "sl2";
    case BenchMethod::SL2s: return "sl2s";
    case BenchMethod::FD2RK2: return "fd2";
    case BenchMethod::FD4RK3: return "fd4";
  }
  return "?";
}

BenchMethod parse_bench_method(const std::string& text) {
  if (text == "sl1") return BenchMethod::SL1;
  if (text == "sl2") return BenchMethod::SL2;
  if (text == "sl2s") return BenchMethod::SL2s;
  if (text == "fd2") return BenchMethod::FD2RK2;
  if (text == "fd4") return BenchMethod::FD4RK3;
  throw ParseError("unknown method '" + text + "' (expected sl1, sl2, sl2s, fd2, fd4)");
}

// ---------------------------------------------------------------------------
// Suites

namespace {

BenchRow mu_row(double dx, double mu, double h = 0.0) {
  BenchRow r;
  r.dx = dx;
  r.step.mu = mu;
  r.ghost_h = h;
  return r;
}

BenchRow dt_row(double dx, double dt) {
  BenchRow r;
  r.dx = dx;
  r.step.dt = dt;
  return r;
}

BenchCase rotation_case(MeshKind mesh, InterpKind interp) {
  BenchCase c;
  c.problem = "solid_rotation";
  c.mesh = mesh;
  c.interp = interp;
  c.rows = {mu_row(0.04, 1.62), mu_row(0.04, 0.82), mu_row(0.02, 3.2), mu_row(0.02, 1.6)};
  // rates against the first row; the last row has dt reduced by 4
  c.pairs = {{0, 1, 2.0}, {0, 2, 2.0}, {0, 3, 4.0}};
  c.sl1_substeps = 20;
  c.sl2s_substeps = 20;
  return c;
}

BenchCase dirichlet_case(const std::string& problem) {
  BenchCase c;
  c.problem = problem;
  c.mesh = MeshKind::TriSquare;
  c.interp = InterpKind::P2;
  c.rows = {mu_row(0.04, 1.56, 0.5), mu_row(0.04, 0.78, 0.5), mu_row(0.02, 3.12, 0.33),
            mu_row(0.02, 1.56, 0.33)};
  c.pairs = {{0, 2, 2.0}, {1, 3, 2.0}};
  return c;
}

BenchCase allen_cahn_case(double nu) {
  BenchCase c;
  c.problem = "allen_cahn(" + format_double(nu) + ")";
  c.rows = {dt_row(0.04, 0.1), dt_row(0.02, 0.05), dt_row(0.01, 0.025)};
  c.pairs = {{0, 1, 2.0}, {1, 2, 2.0}};
  c.reference = ReferenceKind::Oracle;
  c.oracle.min_space_ratio = 2.0;
  return c;
}

}  // namespace

std::vector<std::string> suite_names() {
  auto names = standard_suite_names();
  names.push_back("lotka4");
  return names;
}

std::vector<std::string> standard_suite_names() {
  return {"pure_diffusion", "solid_rotation", "solid_rotation_unstructured", "allen_cahn",
          "bc_diffusion",   "bc_advection",   "bc_rotation",                 "nonconvex_channel"};
}

Suite builtin_suite(const std::string& name) {
  Suite s;
  s.name = name;
  if (name == "pure_diffusion") {
    BenchCase c;
    c.problem = "pure_diffusion";
    c.rows = {mu_row(0.08, 0.84), mu_row(0.04, 1.6), mu_row(0.02, 3.2)};
    c.pairs = {{0, 1, 2.0}, {1, 2, 2.0}};
    s.methods = {BenchMethod::SL1, BenchMethod::SL2};
    s.cases = {c};
  } else if (name == "solid_rotation") {
    s.methods = {BenchMethod::SL1, BenchMethod::SL2s, BenchMethod::SL2};
    s.cases = {rotation_case(MeshKind::Structured, InterpKind::Bicubic)};
  } else if (name == "solid_rotation_unstructured") {
    s.methods = {BenchMethod::SL2s, BenchMethod::SL2};
    s.cases = {rotation_case(MeshKind::TriSquare, InterpKind::P2)};
  } else if (name == "allen_cahn") {
    s.methods = {BenchMethod::SL2};
    s.cases = {allen_cahn_case(0.01), allen_cahn_case(0.05)};
  } else if (name == "bc_diffusion" || name == "bc_advection" || name == "bc_rotation") {
    s.methods = {BenchMethod::SL2};
    s.cases = {dirichlet_case(name)};
  } else if (name == "nonconvex_channel") {
    s.methods = {BenchMethod::SL2};
    s.log_only = true;
  } else if (name == "lotka4") {
    BenchCase c;
    c.problem = "lotka4";
    c.rows = {dt_row(0.05, 0.125)};
    c.reference = ReferenceKind::Oracle;
    c.oracle.min_space_ratio = 2.0;
    s.methods = {BenchMethod::SL2, BenchMethod::FD2RK2, BenchMethod::FD4RK3};
    s.cases = {c};
  } else {
    std::string list;
    for (const auto& n : suite_names()) list += (list.empty() ? "" : ", ") + n;
    throw Error("unknown suite '" + name + "'; available: " + list + ", paper-all");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Running

void fill_rates(ErrorReport& report, const std::vector<RatePair>& pairs) {
  for (const RatePair& p : pairs) {
    if (p.coarse >= report.rows.size() || p.fine >= report.rows.size()) {
      throw Error("rate pair refers to a missing row");
    }
    const ErrorRow& a = report.rows[p.coarse];
    ErrorRow& b = report.rows[p.fine];
    if (!a.ok() || !b.ok()) continue;
    b.p2 = conv_rate(a.l2, b.l2, p.r);
    b.pinf = conv_rate(a.linf, b.linf, p.r);
  }
}

namespace {

std::string pairs_text(const std::vector<RatePair>& pairs) {
  std::string s;
  for (const RatePair& p : pairs) {
    if (!s.empty()) s += ';';
    s += std::to_string(p.coarse) + ">" + std::to_string(p.fine) + ":r=" + format_double(p.r);
  }
  return s;
}

SchemeVariant sl_variant(BenchMethod m) {
  switch (m) {
    case BenchMethod::SL1: return SchemeVariant::SL1;
    case BenchMethod::SL2s: return SchemeVariant::SL2s;
    default: return SchemeVariant::SL2;
  }
}

}  // namespace

ErrorReport run_benchmark(const BenchCase& bc, BenchMethod m, const BenchOptions& opts) {
  if (bc.rows.empty()) throw Error("benchmark has no rows");
  const ProblemSpec problem = builtin_problem(bc.problem);
  const bool baseline = m == BenchMethod::FD2RK2 || m == BenchMethod::FD4RK3;
  if (baseline && bc.mesh != MeshKind::Structured) {
    throw Error("finite-difference baselines need a structured grid");
  }

  ErrorReport report;
  report.problem = problem.name;
  report.scheme = to_string(m);
  report.mesh_kind = to_string(bc.mesh);
  report.interp = baseline ? std::string("none") : to_string(bc.interp);

  // discretizations and step plans first: the oracle needs the finest row
  std::vector<Discretization> discs;
  std::vector<StepPlan> plans;
  for (const BenchRow& row : bc.rows) {
    discs.push_back(make_discretization(problem, bc.mesh, bc.interp, row.dx));
    const double umax = max_speed(problem.velocity, *discs.back().interp);
    plans.push_back(resolve_steps(row.step, problem.final_time, row.dx, problem.nu, umax));
  }

  std::optional<Reference> oracle;
  if (bc.reference == ReferenceKind::Oracle) {
    double min_dx = bc.rows.front().dx;
    double min_dt = plans.front().dt;
    for (std::size_t r = 0; r < bc.rows.size(); ++r) {
      min_dx = std::min(min_dx, bc.rows[r].dx);
      min_dt = std::min(min_dt, plans[r].dt);
    }
    const double dx_ref = bc.oracle_dx > 0.0 ? bc.oracle_dx : min_dx / bc.oracle.min_space_ratio;
    const double dt_ref = min_dt / bc.oracle.min_time_ratio;
    ReferenceOptions ro = bc.oracle;
    ro.cache_dir = opts.cache_dir;
    oracle = make_reference(problem, dx_ref, dt_ref, ro, min_dx, min_dt);
    report.metadata.emplace_back("oracle_dx", format_double(dx_ref));
    report.metadata.emplace_back("oracle_dt", format_double(oracle->dt));
  } else if (!problem.exact) {
    throw Error("problem '" + problem.name + "' has no exact solution");
  }

  for (std::size_t r = 0; r < bc.rows.size(); ++r) {
    const BenchRow& row = bc.rows[r];
    const Interpolator& interp = *discs[r].interp;
    const StepPlan& plan = plans[r];
    ErrorRow out;
    out.dx = row.dx;
    out.dofs = interp.dof_count();
    try {
      const auto t0 = std::chrono::steady_clock::now();

      GridFunction final_field;
      if (baseline) {
        const auto& grid = static_cast<const BicubicInterpolator&>(interp).grid();
        FDScheme scheme = m == BenchMethod::FD2RK2 ? FDScheme{2, TimeIntegrator::RK2}
                                                   : FDScheme{4, TimeIntegrator::RK3};
        const FDSolver solver(problem, grid, scheme);
        const double cap = std::min(plan.dt / bc.baseline_dt_ratio, solver.admissible_dt());
        const auto n = static_cast<std::size_t>(std::ceil(problem.final_time / cap - 1e-9));
        const double dt = problem.final_time / static_cast<double>(n);
        final_field = solver.initial();
        for (std::size_t k = 0; k < n; ++k) solver.step(final_field, static_cast<double>(k) * dt, dt);
        out.dt = dt;
        out.steps = n;
      } else {
        SchemeConfig cfg;
        cfg.variant = sl_variant(m);
        cfg.dt = plan.dt;
        cfg.ghost_h = row.ghost_h;
        if (m == BenchMethod::SL1) cfg.substeps = bc.sl1_substeps;
        if (m == BenchMethod::SL2s) cfg.substeps = bc.sl2s_substeps;
        RunResult res = run(problem, cfg, interp, plan.steps);
        final_field = std::move(res.state.c);
        out.trajectory = res.trajectory;
        out.dt = plan.dt;
        out.steps = plan.steps;
      }
      out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      GridFunction ref;
      if (oracle) {
        ref = restrict_reference(*oracle, interp);
      } else {
        const double T = problem.final_time;
        ref = sample_dofs(interp, problem.species(),
                          [&](Vec2 x, std::size_t s) { return (*problem.exact)(x, T, s); });
      }
      const ErrorNorms e = rel_error(final_field, ref);
      out.l2 = e.l2;
      out.linf = e.linf;
      out.lambda = courant_number(out.dt, max_speed(problem.velocity, interp), row.dx);
      out.mu = parabolic_number(out.dt, problem.nu, row.dx);
      if (opts.verbose) {
        std::cerr << problem.name << ' ' << report.scheme << " dx=" << format_double(row.dx)
                  << " N=" << out.steps << " l2=" << format_double(out.l2) << " ("
                  << format_double(out.seconds) << " s)\n";
      }
    } catch (const Error& e) {
      if (!opts.keep_going) throw;
      out.failure = e.what();
      if (opts.verbose) {
        std::cerr << problem.name << ' ' << report.scheme << " row " << r << " failed: " << e.what()
                  << '\n';
      }
    }
    report.rows.push_back(out);
  }
  fill_rates(report, bc.pairs);

  report.metadata.insert(report.metadata.begin(),
                         {{"problem", report.problem},
                          {"scheme", report.scheme},
                          {"mesh", report.mesh_kind},
                          {"interp", report.interp},
                          {"reference", bc.reference == ReferenceKind::Exact ? "exact" : "fd4-rk4"},
                          {"nu", format_double(problem.nu)},
                          {"T", format_double(problem.final_time)},
                          {"rate_pairs", pairs_text(bc.pairs)}});
  if (m == BenchMethod::SL1 && bc.sl1_substeps > 0) {
    report.metadata.emplace_back("substeps", std::to_string(bc.sl1_substeps));
  }
  if (m == BenchMethod::SL2s && bc.sl2s_substeps > 0) {
    report.metadata.emplace_back("substeps", std::to_string(bc.sl2s_substeps));
  }
  return report;
}

ErrorReport run_benchmark(const std::string& problem, BenchMethod m, const std::vector<BenchRow>& rows,
                          const BenchOptions& opts) {
  BenchCase bc;
  bc.problem = problem;
  const ProblemSpec spec = builtin_problem(problem);
  if (spec.domain.hole) {
    bc.mesh = MeshKind::Channel;
    bc.interp = InterpKind::P2;
  }
  if (!spec.exact) bc.reference = ReferenceKind::Oracle;
  bc.rows = rows;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double ratio = rows[r - 1].dx / rows[r].dx;
    if (ratio > 1.0 + 1e-12) bc.pairs.push_back({r - 1, r, ratio});
  }
  return run_benchmark(bc, m, opts);
}

void write_report_csv(std::ostream& out, const std::vector<ErrorReport>& reports) {
  bool first = true;
  for (const ErrorReport& rep : reports) {
    if (!first) out << '\n';
    first = false;
    for (const auto& [k, v] : rep.metadata) out << "# " << k << '=' << v << '\n';
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      if (!rep.rows[i].ok()) out << "# failed_row=" << i << ": " << rep.rows[i].failure << '\n';
    }
    out << "dx,dt,lambda,mu,l2,linf,p2,pinf\n";
    for (const ErrorRow& r : rep.rows) {
      if (!r.ok()) continue;
      out << format_double(r.dx) << ',' << format_double(r.dt) << ',' << format_double(r.lambda)
          << ',' << format_double(r.mu) << ',' << format_double(r.l2) << ','
          << format_double(r.linf) << ',' << (r.p2 ? format_double(*r.p2) : "") << ','
          << (r.pinf ? format_double(*r.pinf) : "") << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Channel

ChannelLog run_channel(double dx, double dt, const std::vector<double>& checkpoints, BenchMethod m) {
  if (m != BenchMethod::SL1 && m != BenchMethod::SL2 && m != BenchMethod::SL2s) {
    throw Error("the channel run needs a semi-Lagrangian method");
  }
  const ProblemSpec problem = builtin_problem("nonconvex_channel");
  const Discretization disc = make_discretization(problem, MeshKind::Channel, InterpKind::P2, dx);
  const Interpolator& interp = *disc.interp;
  StepRequest req;
  req.dt = dt;
  const StepPlan plan = resolve_steps(req, problem.final_time, dx, problem.nu, 0.0);

  std::vector<std::size_t> marks;
  for (double t : checkpoints) {
    if (!(t > 0.0) || t > problem.final_time * (1.0 + 1e-12)) {
      throw Error("checkpoint " + format_double(t) + " lies outside (0, T]");
    }
    marks.push_back(static_cast<std::size_t>(std::llround(t / plan.dt)));
  }

  ChannelLog log;
  log.dx = dx;
  log.dt = plan.dt;
  log.dofs = interp.dof_count();
  const Disk hole = *problem.domain.hole;
  const double y0 = hole.center.y;
  // samples every 0.01 from just behind the hole, generated from integers to keep the labels clean
  const auto first = static_cast<long>(std::ceil((hole.center.x + hole.radius) * 100.0 - 1e-6)) + 1;
  for (long k = first; static_cast<double>(k) / 100.0 < problem.domain.box.xmax - 1e-9; ++k) {
    log.centerline_x.push_back(static_cast<double>(k) / 100.0);
  }

  SchemeConfig cfg;
  cfg.variant = sl_variant(m);
  cfg.dt = plan.dt;
  run(problem, cfg, interp, plan.steps, [&](const SolverState& st, const StepDiagnostics& d) {
    if (std::find(marks.begin(), marks.end(), st.step) == marks.end()) return;
    ChannelSample s;
    s.t = st.t;
    s.min = d.min[0];
    s.max = d.max[0];
    s.front_x = hole.center.x + hole.radius;
    bool front_open = true;
    for (double x : log.centerline_x) {
      const double v = interp_eval(interp, st.c, {x, y0}, 0);
      s.centerline.push_back(v);
      if (front_open && v >= 0.5) {
        s.front_x = x;
      } else {
        front_open = false;
      }
    }
    log.samples.push_back(std::move(s));
  });
  return log;
}

void write_channel_csv(std::ostream& out, const ChannelLog& log) {
  out << "# problem=nonconvex_channel\n# dx=" << format_double(log.dx)
      << "\n# dt=" << format_double(log.dt) << "\n# dofs=" << log.dofs << '\n';
  out << "t,min,max,front_x";
  for (double x : log.centerline_x) out << ",c@" << format_double(x);
  out << '\n';
  for (const ChannelSample& s : log.samples) {
    out << format_double(s.t) << ',' << format_double(s.min) << ',' << format_double(s.max) << ','
        << format_double(s.front_x);
    for (double v : s.centerline) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace sladr

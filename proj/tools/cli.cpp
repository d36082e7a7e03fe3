#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sladr/bench.hpp"
#include "sladr/field_io.hpp"
#include "sladr/model.hpp"
#include "sladr/parallel.hpp"
#include "sladr/schemes.hpp"

namespace sladr::cli {

namespace {

constexpr double kDefaultDx = 0.04;
constexpr double kChannelDx = 0.025;

MeshKind mesh_kind_for(const RunConfig& c, const ProblemSpec& p) {
  if (c.mesh) return MeshKind::File;
  if (p.domain.hole) return MeshKind::Channel;
  if (c.interp && *c.interp != "bicubic") return MeshKind::TriSquare;
  return MeshKind::Structured;
}

InterpKind parse_interp(const std::string& s) {
  if (s == "bicubic") return InterpKind::Bicubic;
  if (s == "p1") return InterpKind::P1;
  if (s == "p2") return InterpKind::P2;
  throw UsageError("unknown interpolation '" + s + "' (expected p1, p2, bicubic)");
}

ProblemSpec load_problem(const RunConfig& c) {
  if (!c.problem) throw UsageError("no problem given; use --problem <name> or a config file");
  try {
    return builtin_problem(*c.problem);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

}  // namespace

std::string output_dir(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("SLADR_OUT"); env && *env) return env;
  return ".";
}

RunConfig effective_config(const RunConfig& in) {
  RunConfig c = in;
  const ProblemSpec problem = load_problem(c);

  if (!c.scheme) c.scheme = "sl2";
  try {
    (void)parse_scheme_variant(*c.scheme);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (*c.scheme == "sl1") {
    if (!c.theta) c.theta = 1.0;
    if (!(*c.theta >= 0.5 && *c.theta <= 1.0)) throw UsageError("--theta must lie in [0.5, 1]");
  } else if (c.theta) {
    throw UsageError("--theta applies to sl1 only");
  }

  if (c.mesh && c.dx) throw UsageError("--dx and --mesh are mutually exclusive");
  const MeshKind kind = mesh_kind_for(c, problem);
  if (!c.interp) c.interp = kind == MeshKind::Structured ? "bicubic" : "p2";
  const InterpKind ik = parse_interp(*c.interp);
  if (kind != MeshKind::Structured && ik == InterpKind::Bicubic) {
    throw UsageError("bicubic interpolation needs a structured grid");
  }
  if (kind == MeshKind::Structured && problem.domain.hole) {
    throw UsageError("problem has a hole; use p1 or p2 interpolation");
  }
  if (!c.mesh && !c.dx) c.dx = kind == MeshKind::Channel ? kChannelDx : kDefaultDx;
  if (c.dx && !(*c.dx > 0.0)) throw UsageError("--dx must be positive");

  if (c.ghost_h && c.ghost_ch) throw UsageError("--ghost-ch and --ghost-h are mutually exclusive");
  if (c.ghost_h && !(*c.ghost_h > 0.0)) throw UsageError("--ghost-h must be positive");
  if (c.ghost_ch && !(*c.ghost_ch > 0.0)) throw UsageError("--ghost-ch must be positive");
  if (!c.ghost_h && !c.ghost_ch && !problem.domain.periodic()) c.ghost_ch = 1.5;

  const int given = (c.dt ? 1 : 0) + (c.steps ? 1 : 0) + (c.mu ? 1 : 0) + (c.lambda ? 1 : 0);
  if (given == 0) throw UsageError("no time step given; use one of --dt, --steps, --mu, --lambda");
  if (given > 1) throw UsageError("--dt, --steps, --mu and --lambda are mutually exclusive");
  StepRequest req;
  if (c.dt) req.dt = *c.dt;
  if (c.steps) req.steps = *c.steps;
  if (c.mu) req.mu = *c.mu;
  if (c.lambda) req.lambda = *c.lambda;
  if (req.dt < 0.0 || req.mu < 0.0 || req.lambda < 0.0 || (c.steps && *c.steps == 0)) {
    throw UsageError("time step parameters must be positive");
  }
  double dx = c.dx.value_or(0.0);
  double umax = 0.0;
  if (c.lambda || c.mesh) {
    const Discretization d = make_discretization(problem, kind, ik, dx, c.mesh.value_or(""));
    dx = d.dx;
    umax = max_speed(problem.velocity, *d.interp);
  }
  StepPlan plan;
  try {
    plan = resolve_steps(req, problem.final_time, dx, problem.nu, umax);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  c.dt = plan.dt;
  c.steps.reset();
  c.mu.reset();
  c.lambda.reset();

  if (c.threads && *c.threads < 1) throw UsageError("--threads must be >= 1");
  if (c.checkpoints) {
    for (double t : *c.checkpoints) {
      if (t > problem.final_time * (1.0 + 1e-12)) {
        throw UsageError("checkpoint " + format_double(t) + " exceeds T = " +
                         format_double(problem.final_time));
      }
    }
  }
  c.out = output_dir(c.out);
  return c;
}

int cmd_run(const RunConfig& raw, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  ProblemSpec problem;
  try {
    cfg = effective_config(raw);
    problem = load_problem(cfg);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (cfg.threads) set_thread_count(*cfg.threads);
    const MeshKind kind = mesh_kind_for(cfg, problem);
    const Discretization disc = make_discretization(problem, kind, parse_interp(*cfg.interp),
                                                    cfg.dx.value_or(0.0), cfg.mesh.value_or(""));
    const Interpolator& interp = *disc.interp;
    const auto n_steps = static_cast<std::size_t>(std::llround(problem.final_time / *cfg.dt));

    // requested step versus the one that reaches T exactly
    const double requested = raw.dt ? *raw.dt
                             : raw.mu
                                 ? *raw.mu * disc.dx * disc.dx / problem.nu
                                 : raw.lambda ? *raw.lambda * disc.dx /
                                                    max_speed(problem.velocity, interp)
                                              : *cfg.dt;
    if (std::abs(requested - *cfg.dt) > 1e-12 * *cfg.dt) {
      err << "note: dt adjusted from " << format_double(requested) << " to "
          << format_double(*cfg.dt) << " so that N*dt = T with N = " << n_steps << '\n';
    }

    SchemeConfig sc;
    sc.variant = parse_scheme_variant(*cfg.scheme);
    sc.theta = cfg.theta.value_or(1.0);
    sc.dt = *cfg.dt;
    if (cfg.ghost_ch) sc.ghost_ch = *cfg.ghost_ch;
    if (cfg.ghost_h) sc.ghost_h = *cfg.ghost_h;

    const auto dir = prepare_dir(*cfg.out);
    {
      std::ofstream f(dir / "run.cfg");
      write_run_config(f, cfg);
    }

    std::vector<double> marks = cfg.checkpoints.value_or(std::vector<double>{problem.final_time});
    std::vector<std::size_t> mark_steps;
    for (double t : marks) mark_steps.push_back(static_cast<std::size_t>(std::llround(t / sc.dt)));

    const auto dump = [&](const SolverState& st) {
      const auto name = "field_t" + format_double(st.t) + ".csv";
      std::ofstream f(dir / name);
      if (!f) throw Error("cannot write " + (dir / name).string());
      write_field_csv(f, interp, st.c);
      out << "wrote " << (dir / name).string() << '\n';
    };
    RunResult res = run(problem, sc, interp, n_steps, [&](const SolverState& st, const StepDiagnostics&) {
      for (std::size_t k : mark_steps) {
        if (k == st.step) {
          dump(st);
          break;
        }
      }
    });

    out << "problem=" << problem.name << " scheme=" << *cfg.scheme << " dofs=" << interp.dof_count()
        << " steps=" << n_steps << " dt=" << format_double(sc.dt) << " t=" << format_double(res.state.t)
        << '\n';
    const StepDiagnostics& last = res.steps.back();
    for (std::size_t s = 0; s < problem.species(); ++s) {
      out << "species " << s << ": min=" << format_double(last.min[s])
          << " max=" << format_double(last.max[s]) << '\n';
    }
    if (problem.exact) {
      const double T = problem.final_time;
      const GridFunction ref = sample_dofs(interp, problem.species(), [&](Vec2 x, std::size_t s) {
        return (*problem.exact)(x, T, s);
      });
      const ErrorNorms e = rel_error(res.state.c, ref);
      out << "l2=" << format_double(e.l2) << " linf=" << format_double(e.linf) << '\n';
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

int cmd_bench(const BenchRequest& req, std::ostream& out, std::ostream& err) {
  std::vector<Suite> suites;
  std::vector<BenchMethod> methods;
  try {
    if (req.suites.empty()) throw UsageError("no suite given");
    for (const auto& name : req.suites) {
      if (name == "paper-all") {
        for (const auto& n : standard_suite_names()) suites.push_back(builtin_suite(n));
      } else {
        suites.push_back(builtin_suite(name));
      }
    }
    for (const auto& v : req.variants) methods.push_back(parse_bench_method(v));
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::filesystem::path dir;
  try {
    dir = prepare_dir(output_dir(req.out));
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  BenchOptions opts;
  opts.cache_dir = req.cache_dir;
  opts.verbose = req.verbose;
  opts.keep_going = true;

  bool failed = false;
  const auto write_file = [&](const std::string& stem, const auto& writer) {
    const auto path = dir / (stem + ".csv");
    std::ofstream f(path);
    if (!f) {
      err << "error: cannot write " << path.string() << '\n';
      failed = true;
      return;
    }
    writer(f);
    out << "wrote " << path.string() << '\n';
  };

  for (const Suite& suite : suites) {
    if (suite.log_only) {
      const BenchMethod m = methods.empty() ? suite.methods.front() : methods.front();
      try {
        const ChannelLog log = run_channel(kChannelDx, 0.005, {0.5, 1.0, 2.0, 3.0}, m);
        write_file(suite.name, [&](std::ostream& f) { write_channel_csv(f, log); });
      } catch (const std::exception& e) {
        err << "error: " << suite.name << ": " << e.what() << '\n';
        failed = true;
      }
      continue;
    }
    const auto run_group = [&](const std::vector<BenchMethod>& group) {
      std::vector<ErrorReport> reports;
      for (BenchMethod m : group) {
        for (const BenchCase& bc : suite.cases) {
          try {
            reports.push_back(run_benchmark(bc, m, opts));
            for (const ErrorRow& r : reports.back().rows) {
              if (!r.ok()) {
                err << "error: " << suite.name << ' ' << to_string(m) << ": " << r.failure << '\n';
                failed = true;
              }
            }
          } catch (const std::exception& e) {
            err << "error: " << suite.name << ' ' << to_string(m) << ": " << e.what() << '\n';
            failed = true;
          }
        }
      }
      return reports;
    };
    if (methods.empty()) {
      const auto reports = run_group(suite.methods);
      write_file(suite.name, [&](std::ostream& f) { write_report_csv(f, reports); });
    } else {
      for (BenchMethod m : methods) {
        const auto reports = run_group({m});
        write_file(suite.name + "_" + to_string(m),
                   [&](std::ostream& f) { write_report_csv(f, reports); });
      }
    }
  }
  return failed ? kExitSolver : kExitOk;
}

namespace {

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semi-Lagrangian advection-diffusion-reaction solver"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: all cores)")->check(CLI::PositiveNumber);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run one problem");
  std::string config_path, problem, scheme, mesh, interp, out_dir, checkpoints;
  double theta = 0, dx = 0, dt = 0, mu = 0, lambda = 0, ghost_ch = 0, ghost_h = 0;
  std::size_t steps = 0;
  auto* o_config = run_cmd->add_option("--config", config_path, "key=value config file");
  auto* o_problem = run_cmd->add_option("--problem", problem, "Builtin problem name");
  auto* o_scheme = run_cmd->add_option("--scheme", scheme, "sl1, sl2 or sl2s");
  auto* o_theta = run_cmd->add_option("--theta", theta, "Implicitness of the sl1 reaction term");
  auto* o_dx = run_cmd->add_option("--dx", dx, "Grid spacing or target triangle size");
  auto* o_mesh = run_cmd->add_option("--mesh", mesh, "Triangle mesh file");
  auto* o_dt = run_cmd->add_option("--dt", dt, "Time step");
  auto* o_steps = run_cmd->add_option("--steps", steps, "Number of steps");
  auto* o_mu = run_cmd->add_option("--mu", mu, "Time step from dt * nu / dx^2");
  auto* o_lambda = run_cmd->add_option("--lambda", lambda, "Time step from dt * max|u| / dx");
  auto* o_interp = run_cmd->add_option("--interp", interp, "p1, p2 or bicubic");
  auto* o_ghost_ch = run_cmd->add_option("--ghost-ch", ghost_ch, "Ghost layer size c_h * sqrt(dt)");
  auto* o_ghost_h = run_cmd->add_option("--ghost-h", ghost_h, "Absolute ghost layer size");
  auto* o_out = run_cmd->add_option("--out", out_dir, "Output directory (default $SLADR_OUT or .)");
  auto* o_checkpoints = run_cmd->add_option("--checkpoints", checkpoints, "Dump times, e.g. 0.5,1,2");
  run_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run benchmark suites and write CSV tables");
  std::vector<std::string> suite_args, variant_args;
  std::string bench_out, cache_dir;
  bool verbose = false;
  bench_cmd->add_option("--suite", suite_args, "Suite names or paper-all")->required();
  bench_cmd->add_option("--variant", variant_args, "Methods: sl1, sl2, sl2s, fd2, fd4");
  auto* o_bench_out = bench_cmd->add_option("--out", bench_out, "Output directory");
  bench_cmd->add_option("--cache", cache_dir, "Reference solution cache directory");
  bench_cmd->add_flag("--verbose", verbose, "Progress on stderr");
  bench_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* list_cmd = app.add_subcommand("list", "List builtin problems and suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  if (threads > 0) set_thread_count(threads);

  if (*list_cmd) {
    out << "problems:";
    for (const auto& n : builtin_problem_names()) out << ' ' << n;
    out << "\nsuites:";
    for (const auto& n : suite_names()) out << ' ' << n;
    out << " paper-all\n";
    return kExitOk;
  }

  if (*bench_cmd) {
    BenchRequest req;
    req.suites = split_list(suite_args);
    req.variants = split_list(variant_args);
    if (o_bench_out->count()) req.out = bench_out;
    req.cache_dir = cache_dir;
    req.verbose = verbose;
    return cmd_bench(req, out, err);
  }

  RunConfig cfg;
  try {
    if (o_config->count()) cfg = read_run_config(config_path);
    RunConfig flags;
    if (o_problem->count()) flags.problem = problem;
    if (o_scheme->count()) flags.scheme = scheme;
    if (o_theta->count()) flags.theta = theta;
    if (o_dx->count()) flags.dx = dx;
    if (o_mesh->count()) flags.mesh = mesh;
    if (o_dt->count()) flags.dt = dt;
    if (o_steps->count()) flags.steps = steps;
    if (o_mu->count()) flags.mu = mu;
    if (o_lambda->count()) flags.lambda = lambda;
    if (o_interp->count()) flags.interp = interp;
    if (o_ghost_ch->count()) flags.ghost_ch = ghost_ch;
    if (o_ghost_h->count()) flags.ghost_h = ghost_h;
    if (o_out->count()) flags.out = out_dir;
    if (threads > 0) flags.threads = threads;
    if (o_checkpoints->count()) flags.checkpoints = parse_number_list(checkpoints);
    // a step flag replaces whichever step setting the file had
    if (flags.dt || flags.steps || flags.mu || flags.lambda) {
      cfg.dt.reset();
      cfg.steps.reset();
      cfg.mu.reset();
      cfg.lambda.reset();
    }
    if (flags.mesh) cfg.dx.reset();
    if (flags.dx) cfg.mesh.reset();
    cfg.merge(flags);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return cmd_run(cfg, out, err);
}

}  // namespace sladr::cli

#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "sladr/characteristics.hpp"
#include "sladr/interp.hpp"
#include "sladr/schemes.hpp"

using namespace sladr;

namespace {

void BM_BicubicStencil(benchmark::State& state) {
  const BicubicInterpolator I(StructuredGrid({-2, 2, -2, 2}, 200, 200));
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Vec2> pts(4096);
  for (auto& p : pts) p = {u(rng), u(rng)};
  Stencil st;
  std::size_t k = 0;
  for (auto _ : state) {
    I.stencil(pts[k++ & 4095], st);
    benchmark::DoNotOptimize(st);
  }
}
BENCHMARK(BM_BicubicStencil);

void BM_P2Locate(benchmark::State& state) {
  const TriInterpolator I(std::make_shared<TriMesh>(gen_square_trimesh({-1, 1, -1, 1}, 0.02)), 2);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec2> pts(4096);
  for (auto& p : pts) p = {u(rng), u(rng)};
  Stencil st;
  std::size_t k = 0;
  for (auto _ : state) {
    I.stencil(pts[k++ & 4095], st);
    benchmark::DoNotOptimize(st);
  }
}
BENCHMARK(BM_P2Locate);

void BM_FeetTable(benchmark::State& state) {
  const auto v = static_cast<SchemeVariant>(state.range(0));
  const BicubicInterpolator I(StructuredGrid({-2, 2, -2, 2}, 100, 100));
  const auto u = VelocityField::rotation(6.283185307179586);
  for (auto _ : state) {
    const FeetTable t = build_feet_table(I, 0.05, 0.05, v, u, 0.05);
    benchmark::DoNotOptimize(t.feet.data());
  }
  state.SetLabel(to_string(v));
}
BENCHMARK(BM_FeetTable)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& state) {
  const ProblemSpec p = builtin_problem(state.range(0) == 1 ? "solid_rotation" : "lotka4");
  const BicubicInterpolator I(StructuredGrid(p.domain.box, 100, 100));
  SchemeConfig cfg;
  cfg.dt = 0.05;
  const Stepper stepper(p, I, cfg);
  SolverState s = stepper.initial_state();
  for (auto _ : state) {
    SolverState w = s;
    benchmark::DoNotOptimize(stepper.step(w).max.data());
  }
  state.SetLabel(p.name);
}
BENCHMARK(BM_Step)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "sladr/characteristics.hpp"
#include "sladr/error.hpp"
#include "sladr/interp.hpp"

using namespace sladr;

namespace {

constexpr double kPi = std::numbers::pi;

Vec2 rotate(Vec2 p, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

}  // namespace

TEST(Displacements, WeightsSumToOne) {
  for (const auto& d : {first_order_displacements(0.05, 0.1), second_order_displacements(0.05, 0.1)}) {
    EXPECT_NEAR(std::accumulate(d.weights.begin(), d.weights.end(), 0.0), 1.0, 1e-15);
    EXPECT_EQ(d.weights.size(), d.directions.size());
  }
}

TEST(Displacements, SecondOrderSet) {
  const auto d = second_order_displacements(0.05, 0.1);
  ASSERT_EQ(d.size(), 9u);
  EXPECT_NEAR(d.amplitude, std::sqrt(0.03), 1e-15);
  EXPECT_DOUBLE_EQ(d.weights[8], 4.0 / 9.0);
  EXPECT_EQ(d.directions[8], (Vec2{0, 0}));
  // second moments reproduce the diffusion tensor: sum a_k d_k d_k^T = 2 nu dt I
  double xx = 0, xy = 0, yy = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const Vec2 o = d.offset(k);
    xx += d.weights[k] * o.x * o.x;
    xy += d.weights[k] * o.x * o.y;
    yy += d.weights[k] * o.y * o.y;
  }
  EXPECT_NEAR(xx, 2 * 0.05 * 0.1, 1e-15);
  EXPECT_NEAR(yy, 2 * 0.05 * 0.1, 1e-15);
  EXPECT_NEAR(xy, 0.0, 1e-15);
}

TEST(Displacements, FirstOrderSet) {
  const auto d = first_order_displacements(0.05, 0.1);
  ASSERT_EQ(d.size(), 4u);
  EXPECT_NEAR(d.amplitude, std::sqrt(0.02), 1e-15);
  Vec2 sum{};
  for (std::size_t k = 0; k < d.size(); ++k) {
    EXPECT_DOUBLE_EQ(d.weights[k], 0.25);
    sum += d.offset(k);
  }
  EXPECT_EQ(sum, (Vec2{0, 0}));
}

TEST(Feet, EulerWithConstantVelocity) {
  const auto u = VelocityField::constant({1.0, -0.5});
  const Vec2 z = feet_euler_substep({0.2, 0.3}, 0.0, 0.1, 4, u);
  EXPECT_NEAR(z.x, 0.1, 1e-15);
  EXPECT_NEAR(z.y, 0.35, 1e-15);
}

TEST(Feet, ImplicitLinearClosedForm) {
  const auto u = VelocityField::linear(1, 0, 0, 1);
  const double nu = 0.05, dt = 0.1;
  const Vec2 x{0.7, -0.4};
  const Vec2 e{1.0, -1.0};
  const Vec2 z = feet_implicit_second_order(x, dt, dt, u, nu, e);
  const double s = std::sqrt(6 * nu * dt);
  EXPECT_NEAR(z.x, (x.x * (1 - dt / 2) + s * e.x) / (1 + dt / 2), 1e-12);
  EXPECT_NEAR(z.y, (x.y * (1 - dt / 2) + s * e.y) / (1 + dt / 2), 1e-12);
}

TEST(Feet, TrapezoidSubstepsConvergeAtSecondOrder) {
  const auto u = VelocityField::rotation(2 * kPi);
  const Vec2 x{1.0, 0.0};
  const double dt = 0.1;
  const Vec2 exact = rotate(x, -2 * kPi * dt);
  const double e1 = distance(feet_trapezoid_substep(x, dt, dt, 2, u), exact);
  const double e2 = distance(feet_trapezoid_substep(x, dt, dt, 4, u), exact);
  const double e3 = distance(feet_trapezoid_substep(x, dt, dt, 8, u), exact);
  EXPECT_NEAR(e1 / e2, 4.0, 0.2);
  EXPECT_NEAR(e2 / e3, 4.0, 0.2);
}

TEST(Feet, EulerSubstepsConvergeAtFirstOrder) {
  const auto u = VelocityField::rotation(2 * kPi);
  const Vec2 x{1.0, 0.0};
  const double dt = 0.1;
  const Vec2 exact = rotate(x, -2 * kPi * dt);
  const double e1 = distance(feet_euler_substep(x, 0.0, dt, 10, u), exact);
  const double e2 = distance(feet_euler_substep(x, 0.0, dt, 20, u), exact);
  EXPECT_NEAR(e1 / e2, 2.0, 0.15);
}

TEST(Feet, ZeroDiffusionCollapsesTheStencil) {
  const BicubicInterpolator I(StructuredGrid({-1, 1, -1, 1}, 8, 8));
  const auto u = VelocityField::rotation(1.0);
  for (auto v : {SchemeVariant::SL1, SchemeVariant::SL2, SchemeVariant::SL2s}) {
    const FeetTable t = build_feet_table(I, 0.1, 0.1, v, u, 0.0);
    for (std::size_t i = 0; i < t.n_dofs; ++i) {
      for (std::size_t k = 1; k < t.per_dof; ++k) EXPECT_EQ(t.foot(i, k), t.foot(i, 0));
    }
  }
}

TEST(Feet, TranslationEquivariance) {
  const auto u = VelocityField::constant({0.3, 0.1});
  const BicubicInterpolator a(StructuredGrid({-1, 1, -1, 1}, 10, 10));
  const BicubicInterpolator b(StructuredGrid({-0.5, 1.5, -1.25, 0.75}, 10, 10));
  const Vec2 shift{0.5, -0.25};
  for (auto v : {SchemeVariant::SL1, SchemeVariant::SL2, SchemeVariant::SL2s}) {
    const FeetTable ta = build_feet_table(a, 0.2, 0.05, v, u, 0.05);
    const FeetTable tb = build_feet_table(b, 0.2, 0.05, v, u, 0.05);
    for (std::size_t j = 0; j < ta.feet.size(); ++j) {
      EXPECT_NEAR(tb.feet[j].x, ta.feet[j].x + shift.x, 1e-13);
      EXPECT_NEAR(tb.feet[j].y, ta.feet[j].y + shift.y, 1e-13);
    }
  }
}

TEST(Feet, SecondOrderFootMatchesTrapezoidRule) {
  const auto u = VelocityField::rotation(2 * kPi);
  const Vec2 x{0.4, 0.3};
  const double dt = 0.02;
  const Vec2 off{0.01, -0.02};
  const Vec2 z = feet_implicit_second_order(x, dt, dt, u, off);
  const Vec2 r = x - 0.5 * dt * (u(x, dt) + u(z, 0.0)) + off;
  EXPECT_NEAR(z.x, r.x, 1e-12);
  EXPECT_NEAR(z.y, r.y, 1e-12);
}

TEST(Feet, TableMarksExteriorFeet) {
  const BicubicInterpolator I(StructuredGrid({-1, 1, -1, 1}, 8, 8));
  const FeetTable t = build_feet_table(I, 0.1, 0.1, SchemeVariant::SL2, VelocityField::zero(), 0.05);
  EXPECT_EQ(t.per_dof, 9u);
  EXPECT_GT(t.outside_count(), 0u);
  // the corner dof has feet outside in the diagonal directions
  EXPECT_TRUE(t.outside(0, 3));
  EXPECT_FALSE(t.outside(0, 8));
}

TEST(Feet, PeriodicFeetAreWrapped) {
  const BicubicInterpolator I(StructuredGrid({0, 1, 0, 1}, 8, 8, true, true));
  const FeetTable t = build_feet_table(I, 0.1, 0.1, SchemeVariant::SL2, VelocityField::zero(), 0.05);
  EXPECT_EQ(t.outside_count(), 0u);
  for (const Vec2& z : t.feet) {
    EXPECT_GE(z.x, 0.0);
    EXPECT_LT(z.x, 1.0);
  }
}

TEST(Feet, CountersMatchTheDefinition) {
  const BicubicInterpolator I(StructuredGrid({-1, 1, -1, 1}, 4, 4));
  const auto u = VelocityField::constant({0.1, 0.0});
  const FeetTable t = build_feet_table(I, 0.1, 0.1, SchemeVariant::SL1, u, 0.05, {.substeps = 3, .fixed_point = {}});
  EXPECT_EQ(t.substeps, 3);
  EXPECT_EQ(t.stats.velocity_evals, 25u * 3u);
  EXPECT_EQ(t.stats.iterations, 0u);
}

TEST(Feet, DefaultSubsteps) {
  EXPECT_EQ(default_substeps(0.05, 2 * kPi), 1);
  EXPECT_EQ(default_substeps(0.1, 2 * kPi), 2);
  EXPECT_EQ(default_substeps(0.1, 0.0), 1);
}

TEST(Feet, NonContractiveFixedPointThrows) {
  const auto u = VelocityField::linear(5, 0, 0, 5);
  try {
    feet_implicit_second_order({0.5, 0.5}, 1.0, 1.0, u, Vec2{});
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(SchemeVariant, ParseAndPrint) {
  EXPECT_EQ(parse_scheme_variant("SL2s"), SchemeVariant::SL2s);
  EXPECT_EQ(to_string(SchemeVariant::SL1), "sl1");
  EXPECT_THROW(parse_scheme_variant("sl3"), Error);
}

// The decoupled variant adds the offset after the deterministic foot, the coupled one inside the
// implicit relation. The two differ by dt/2 (grad u) offset, which is O(dt^1.5) when nu > 0.
TEST(Feet, DecoupledAndCoupledFeetDifferAtOrderThreeHalves) {
  const auto u = VelocityField::rotation(2 * kPi);
  const auto gap = [&](double dt, double nu) {
    const BicubicInterpolator I(StructuredGrid({-0.5, 0.5, -0.5, 0.5}, 10, 10));
    FeetOptions opts;
    opts.substeps = 1;
    const FeetTable a = build_feet_table(I, dt, dt, SchemeVariant::SL2, u, nu, opts);
    const FeetTable b = build_feet_table(I, dt, dt, SchemeVariant::SL2s, u, nu, opts);
    double g = 0.0;
    for (std::size_t j = 0; j < a.feet.size(); ++j) g = std::max(g, norm(a.feet[j] - b.feet[j]));
    return g;
  };
  EXPECT_NEAR(gap(0.025, 0.05) / gap(0.0125, 0.05), std::pow(2.0, 1.5), 0.15);
  // without diffusion and with a single substep both reduce to the same trapezoid foot
  EXPECT_LT(gap(0.025, 0.0), 1e-12);
}

TEST(Feet, DistinctPointsKeepHalfTheirDistance) {
  const auto u = VelocityField::potential_flow_around_disk(1.0, 0.5, {0.0, 0.0});
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> r(-2.0, 2.0);
  const double dt = 0.05;
  for (int k = 0; k < 2000; ++k) {
    const Vec2 x1{r(rng), r(rng)}, x2{r(rng), r(rng)};
    if (norm(x1) < 0.6 || norm(x2) < 0.6) continue;
    const Vec2 off{0.03, -0.01};
    const Vec2 z1 = feet_implicit_second_order(x1, dt, dt, u, off);
    const Vec2 z2 = feet_implicit_second_order(x2, dt, dt, u, off);
    EXPECT_GE(norm(z1 - z2), 0.5 * norm(x1 - x2));
  }
}

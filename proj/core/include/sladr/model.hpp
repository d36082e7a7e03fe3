#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sladr/geometry.hpp"

namespace sladr {

/// Advecting velocity u(x, t) with an analytic Lipschitz bound in x.
class VelocityField {
 public:
  enum class Kind { Zero, Constant, Rotation, PotentialFlowAroundDisk, Linear, Custom };
  using Fn = std::function<Vec2(Vec2, double)>;

  static VelocityField zero();
  static VelocityField constant(Vec2 u0);
  /// Solid-body rotation u = omega * (-(y - cy), x - cx).
  static VelocityField rotation(double omega, Vec2 center = {});
  /// Potential flow past a sphere of radius r0, sampled in the plane.
  static VelocityField potential_flow_around_disk(double u0, double r0, Vec2 center);
  /// u = A x + b with A = [[a11, a12], [a21, a22]].
  static VelocityField linear(double a11, double a12, double a21, double a22, Vec2 b = {});
  static VelocityField custom(Fn fn, double lipschitz);

  Vec2 operator()(Vec2 p, double t) const;
  Kind kind() const { return kind_; }
  double lipschitz() const { return lipschitz_; }
  bool is_zero() const { return kind_ == Kind::Zero; }

 private:
  Kind kind_ = Kind::Zero;
  Vec2 vec_{};      // constant velocity, rotation/flow center, or affine offset
  double a_[4]{};   // rotation rate / flow parameters / affine matrix
  double lipschitz_ = 0.0;
  Fn fn_;
};

/// Reaction term f: R^S -> R^S with its analytic jacobian.
class ReactionTerm {
 public:
  using Fn = std::function<void(std::span<const double>, std::span<double>)>;

  static ReactionTerm zero(std::size_t species = 1);
  /// f(c) = lambda * c, componentwise.
  static ReactionTerm linear(double lambda, std::size_t species = 1);
  /// f(c) = c - c^3.
  static ReactionTerm allen_cahn();
  /// f(c) = sin(c).
  static ReactionTerm sine();
  /// Two coupled Lotka-Volterra prey-predator pairs (S = 4).
  static ReactionTerm lotka4();
  /// `jac` fills an S x S row-major matrix.
  static ReactionTerm custom(std::size_t species, Fn f, Fn jac, double lipschitz);

  std::size_t species() const { return species_; }
  bool is_zero() const { return zero_; }
  double lipschitz() const { return lipschitz_; }
  void eval(std::span<const double> c, std::span<double> out) const { f_(c, out); }
  void jacobian(std::span<const double> c, std::span<double> out) const { jac_(c, out); }

 private:
  std::size_t species_ = 1;
  bool zero_ = true;
  double lipschitz_ = 0.0;
  Fn f_;
  Fn jac_;
};

enum class BoundaryKind { Dirichlet, Periodic };

struct Domain {
  Rect box;
  std::optional<Disk> hole;
  BoundaryKind boundary = BoundaryKind::Dirichlet;

  bool periodic() const { return boundary == BoundaryKind::Periodic; }
  bool contains(Vec2 p) const;
};

/// Everything needed to pose one advection-diffusion-reaction problem.
struct ProblemSpec {
  using InitialFn = std::function<double(Vec2, std::size_t)>;
  using BoundaryFn = std::function<double(Vec2, double, std::size_t)>;

  std::string name;
  Domain domain;
  VelocityField velocity;
  double nu = 0.0;
  ReactionTerm reaction;
  InitialFn initial;
  BoundaryFn boundary;
  std::optional<BoundaryFn> exact;
  double final_time = 1.0;

  std::size_t species() const { return reaction.species(); }
  double sigma() const;
  /// Throws Error when a field is missing or out of range.
  void validate() const;
};

/// Gaussian of width sigma0 spreading under diffusion nu, centered at the origin.
double gaussian_diffusion_exact(double x, double y, double t, double nu, double sigma0);

/// The same Gaussian carried by a solid-body rotation about the origin,
/// starting from (x0, y0).
double rotating_gaussian_exact(double x, double y, double t, double nu, double sigma0, double omega,
                               double x0, double y0);

/// Names accepted by builtin_problem (allen_cahn takes an optional "(nu)").
std::vector<std::string> builtin_problem_names();
ProblemSpec builtin_problem(const std::string& name);

}  // namespace sladr

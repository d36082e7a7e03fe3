#include "sladr/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "sladr/error.hpp"

namespace sladr {

// ---------------------------------------------------------------------------
// VelocityField

VelocityField VelocityField::zero() { return {}; }

VelocityField VelocityField::constant(Vec2 u0) {
  VelocityField v;
  v.kind_ = Kind::Constant;
  v.vec_ = u0;
  return v;
}

VelocityField VelocityField::rotation(double omega, Vec2 center) {
  VelocityField v;
  v.kind_ = Kind::Rotation;
  v.vec_ = center;
  v.a_[0] = omega;
  v.lipschitz_ = std::abs(omega);
  return v;
}

VelocityField VelocityField::potential_flow_around_disk(double u0, double r0, Vec2 center) {
  if (!(r0 > 0.0)) throw Error("potential flow: radius must be positive");
  VelocityField v;
  v.kind_ = Kind::PotentialFlowAroundDisk;
  v.vec_ = center;
  v.a_[0] = u0;
  v.a_[1] = r0;
  // the Hessian of the potential is bounded by 9 u0 r0^3 / (2 r^4) outside the disk
  v.lipschitz_ = 4.5 * std::abs(u0) / r0;
  return v;
}

VelocityField VelocityField::linear(double a11, double a12, double a21, double a22, Vec2 b) {
  VelocityField v;
  v.kind_ = Kind::Linear;
  v.vec_ = b;
  v.a_[0] = a11;
  v.a_[1] = a12;
  v.a_[2] = a21;
  v.a_[3] = a22;
  // Frobenius norm bounds the operator norm
  v.lipschitz_ = std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22);
  return v;
}

VelocityField VelocityField::custom(Fn fn, double lipschitz) {
  if (!fn) throw Error("custom velocity field needs an evaluator");
  VelocityField v;
  v.kind_ = Kind::Custom;
  v.fn_ = std::move(fn);
  v.lipschitz_ = lipschitz;
  return v;
}

Vec2 VelocityField::operator()(Vec2 p, double t) const {
  switch (kind_) {
    case Kind::Zero: return {};
    case Kind::Constant: return vec_;
    case Kind::Rotation: {
      const Vec2 d = p - vec_;
      return {-a_[0] * d.y, a_[0] * d.x};
    }
    case Kind::PotentialFlowAroundDisk: {
      const double u0 = a_[0];
      const double r0 = a_[1];
      const Vec2 d = p - vec_;
      const double r2 = dot(d, d);
      if (r2 == 0.0) return {u0, 0.0};
      const double r = std::sqrt(r2);
      const double r3 = r2 * r;
      const double r5 = r3 * r2;
      const double k = u0 * r0 * r0 * r0;
      return {u0 + k / (2.0 * r3) - 3.0 * k * d.x * d.x / (2.0 * r5),
              -3.0 * k * d.x * d.y / (2.0 * r5)};
    }
    case Kind::Linear:
      return {a_[0] * p.x + a_[1] * p.y + vec_.x, a_[2] * p.x + a_[3] * p.y + vec_.y};
    case Kind::Custom: return fn_(p, t);
  }
  return {};
}

// ---------------------------------------------------------------------------
// ReactionTerm

ReactionTerm ReactionTerm::zero(std::size_t species) {
  ReactionTerm r;
  r.species_ = species;
  r.f_ = [](std::span<const double>, std::span<double> out) {
    for (auto& v : out) v = 0.0;
  };
  r.jac_ = r.f_;
  return r;
}

ReactionTerm ReactionTerm::linear(double lambda, std::size_t species) {
  ReactionTerm r;
  r.species_ = species;
  r.zero_ = lambda == 0.0;
  r.lipschitz_ = std::abs(lambda);
  r.f_ = [lambda](std::span<const double> c, std::span<double> out) {
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = lambda * c[i];
  };
  r.jac_ = [lambda, species](std::span<const double>, std::span<double> out) {
    for (auto& v : out) v = 0.0;
    for (std::size_t i = 0; i < species; ++i) out[i * species + i] = lambda;
  };
  return r;
}

ReactionTerm ReactionTerm::allen_cahn() {
  ReactionTerm r;
  r.zero_ = false;
  r.lipschitz_ = 2.0;  // |1 - 3c^2| on the invariant region [-1, 1]
  r.f_ = [](std::span<const double> c, std::span<double> out) { out[0] = c[0] - c[0] * c[0] * c[0]; };
  r.jac_ = [](std::span<const double> c, std::span<double> out) { out[0] = 1.0 - 3.0 * c[0] * c[0]; };
  return r;
}

ReactionTerm ReactionTerm::sine() {
  ReactionTerm r;
  r.zero_ = false;
  r.lipschitz_ = 1.0;
  r.f_ = [](std::span<const double> c, std::span<double> out) { out[0] = std::sin(c[0]); };
  r.jac_ = [](std::span<const double> c, std::span<double> out) { out[0] = std::cos(c[0]); };
  return r;
}

ReactionTerm ReactionTerm::lotka4() {
  ReactionTerm r;
  r.species_ = 4;
  r.zero_ = false;
  r.lipschitz_ = 12.0;  // jacobian row sums on [-2, 2]^4
  r.f_ = [](std::span<const double> c, std::span<double> f) {
    f[0] = (c[0] - c[0] * c[1]) - (c[0] - c[2]) / 5.0;
    f[1] = -2.0 * (c[1] - c[0] * c[1]) - (c[1] - c[3]) / 5.0;
    f[2] = 2.0 * (c[2] - c[2] * c[3]);
    f[3] = -4.0 * (c[3] - c[2] * c[3]);
  };
  r.jac_ = [](std::span<const double> c, std::span<double> j) {
    j[0] = 1.0 - c[1] - 0.2;
    j[1] = -c[0];
    j[2] = 0.2;
    j[3] = 0.0;
    j[4] = 2.0 * c[1];
    j[5] = -2.0 + 2.0 * c[0] - 0.2;
    j[6] = 0.0;
    j[7] = 0.2;
    j[8] = 0.0;
    j[9] = 0.0;
    j[10] = 2.0 - 2.0 * c[3];
    j[11] = -2.0 * c[2];
    j[12] = 0.0;
    j[13] = 0.0;
    j[14] = 4.0 * c[3];
    j[15] = -4.0 + 4.0 * c[2];
  };
  return r;
}

ReactionTerm ReactionTerm::custom(std::size_t species, Fn f, Fn jac, double lipschitz) {
  if (species == 0) throw Error("reaction term needs at least one species");
  if (!f || !jac) throw Error("custom reaction term needs f and its jacobian");
  ReactionTerm r;
  r.species_ = species;
  r.zero_ = false;
  r.lipschitz_ = lipschitz;
  r.f_ = std::move(f);
  r.jac_ = std::move(jac);
  return r;
}

// ---------------------------------------------------------------------------
// Problems

bool Domain::contains(Vec2 p) const {
  if (!periodic() && !box.contains(p)) return false;
  if (hole && distance(p, hole->center) < hole->radius) return false;
  return true;
}

double ProblemSpec::sigma() const { return std::sqrt(2.0 * nu); }

void ProblemSpec::validate() const {
  if (!(nu >= 0.0)) throw Error("problem '" + name + "': diffusivity must be >= 0");
  if (!(final_time > 0.0)) throw Error("problem '" + name + "': final time must be > 0");
  if (reaction.species() < 1) throw Error("problem '" + name + "': needs at least one species");
  if (!initial) throw Error("problem '" + name + "': missing initial datum");
  if (!domain.periodic() && !boundary) throw Error("problem '" + name + "': missing boundary data");
  if (!(domain.box.width() > 0.0) || !(domain.box.height() > 0.0)) {
    throw Error("problem '" + name + "': empty domain");
  }
}

namespace {

double spread_gaussian(double dx, double dy, double t, double nu, double sigma0) {
  const double s2 = sigma0 * sigma0;
  return std::exp(-(dx * dx + dy * dy) / (2.0 * (s2 + 2.0 * nu * t))) / (1.0 + 2.0 * nu * t / s2);
}

ProblemSpec gaussian_problem(std::string name, Rect box, VelocityField u, double nu, double sigma0,
                             Vec2 start, double final_time) {
  ProblemSpec p;
  p.name = std::move(name);
  p.domain.box = box;
  p.velocity = u;
  p.nu = nu;
  p.reaction = ReactionTerm::zero();
  p.final_time = final_time;
  // the center follows the flow exactly for constant and rotating fields
  auto center = [u, start](double t) -> Vec2 {
    switch (u.kind()) {
      case VelocityField::Kind::Constant: return start + t * u({}, 0.0);
      case VelocityField::Kind::Rotation: {
        const double w = u({1.0, 0.0}, 0.0).y;
        const double c = std::cos(w * t), s = std::sin(w * t);
        return {start.x * c - start.y * s, start.x * s + start.y * c};
      }
      default: return start;
    }
  };
  auto exact = [center, nu, sigma0](Vec2 q, double t, std::size_t) {
    const Vec2 m = center(t);
    return spread_gaussian(q.x - m.x, q.y - m.y, t, nu, sigma0);
  };
  p.initial = [exact](Vec2 q, std::size_t s) { return exact(q, 0.0, s); };
  p.boundary = exact;
  p.exact = exact;
  return p;
}

double parse_nu_argument(const std::string& name, const std::string& base, double fallback) {
  if (name == base) return fallback;
  const std::string rest = name.substr(base.size());
  if (rest.size() < 3 || rest.front() != '(' || rest.back() != ')') {
    throw Error("malformed problem name '" + name + "'; expected " + base + "(<nu>)");
  }
  std::istringstream ss(rest.substr(1, rest.size() - 2));
  double nu = 0.0;
  std::string trailing;
  if (!(ss >> nu) || (ss >> trailing) || !(nu >= 0.0)) {
    throw Error("malformed diffusivity in problem name '" + name + "'");
  }
  return nu;
}

}  // namespace

double gaussian_diffusion_exact(double x, double y, double t, double nu, double sigma0) {
  return spread_gaussian(x, y, t, nu, sigma0);
}

double rotating_gaussian_exact(double x, double y, double t, double nu, double sigma0, double omega,
                               double x0, double y0) {
  const double c = std::cos(omega * t);
  const double s = std::sin(omega * t);
  const double xc = x0 * c - y0 * s;
  const double yc = x0 * s + y0 * c;
  return spread_gaussian(x - xc, y - yc, t, nu, sigma0);
}

std::vector<std::string> builtin_problem_names() {
  return {"pure_diffusion", "solid_rotation", "allen_cahn", "lotka4",
          "bc_diffusion",   "bc_advection",   "bc_rotation", "nonconvex_channel"};
}

ProblemSpec builtin_problem(const std::string& name) {
  constexpr double pi = std::numbers::pi;
  const Rect wide{-2.0, 2.0, -2.0, 2.0};
  const Rect unit_box{-1.0, 1.0, -1.0, 1.0};

  if (name == "pure_diffusion") {
    return gaussian_problem(name, wide, VelocityField::zero(), 0.05, 0.1, {0.0, 0.0}, 1.0);
  }
  if (name == "solid_rotation") {
    return gaussian_problem(name, wide, VelocityField::rotation(2.0 * pi), 0.05, 0.05, {1.0, 0.0},
                            1.0);
  }
  if (name == "bc_diffusion") {
    return gaussian_problem(name, unit_box, VelocityField::zero(), 0.05, 0.1, {0.5, 0.0}, 1.0);
  }
  if (name == "bc_advection") {
    return gaussian_problem(name, unit_box, VelocityField::constant({1.0, 0.0}), 0.05, 0.1,
                            {0.5, 0.0}, 1.0);
  }
  if (name == "bc_rotation") {
    return gaussian_problem(name, unit_box, VelocityField::rotation(2.0 * pi), 0.05, 0.1,
                            {0.5, 0.0}, 1.0);
  }
  if (name.rfind("allen_cahn", 0) == 0) {
    const double nu = parse_nu_argument(name, "allen_cahn", 0.01);
    ProblemSpec p;
    std::ostringstream label;
    label << "allen_cahn(" << nu << ")";
    p.name = label.str();
    p.domain.box = {0.0, 1.0, 0.0, 1.0};
    p.domain.boundary = BoundaryKind::Periodic;
    p.velocity = VelocityField::zero();
    p.nu = nu;
    p.reaction = ReactionTerm::allen_cahn();
    p.final_time = 2.0;
    p.initial = [](Vec2 q, std::size_t) { return std::sin(2.0 * pi * q.x) * std::sin(2.0 * pi * q.y); };
    return p;
  }
  if (name == "lotka4") {
    ProblemSpec p;
    p.name = name;
    p.domain.box = {-5.0, 5.0, -5.0, 5.0};
    p.velocity = VelocityField::rotation(2.0 * pi / 10.0);
    p.nu = 0.01;
    p.reaction = ReactionTerm::lotka4();
    p.final_time = 5.0;
    p.initial = [](Vec2 q, std::size_t s) {
      const double r2 = (q.x + 2.5) * (q.x + 2.5) + q.y * q.y;
      const double bump = r2 <= 0.25 ? std::cos(2.0 * pi * r2) : 0.0;
      return (s % 2 == 0) ? bump : 3.0 * bump;
    };
    p.boundary = [](Vec2, double, std::size_t) { return 0.0; };
    return p;
  }
  if (name == "nonconvex_channel") {
    constexpr double r0 = 0.05;
    const Vec2 center{0.1, 0.2};
    ProblemSpec p;
    p.name = name;
    p.domain.box = {0.0, 1.0, 0.0, 0.4};
    p.domain.hole = Disk{center, r0};
    p.velocity = VelocityField::potential_flow_around_disk(0.2, r0, center);
    p.nu = 0.001;
    p.reaction = ReactionTerm::zero();
    p.final_time = 3.0;
    p.initial = [](Vec2, std::size_t) { return 0.0; };
    p.boundary = [center](Vec2 q, double, std::size_t) {
      // the hole test accepts points on the polygonalized circle's chords
      if (distance(q, center) <= r0 + 1e-9) return 1.0;
      if (std::abs(q.x) <= 1e-9) return q.y * (0.4 - q.y) * 4.0 / (0.4 * 0.4);
      return 0.0;
    };
    return p;
  }

  std::string list;
  for (const auto& n : builtin_problem_names()) list += (list.empty() ? "" : ", ") + n;
  throw Error("unknown problem '" + name + "'; valid problems: " + list + " (allen_cahn(<nu>))");
}

}  // namespace sladr

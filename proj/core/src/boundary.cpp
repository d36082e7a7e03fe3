#include "sladr/boundary.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sladr/error.hpp"
#include "sladr/parallel.hpp"

namespace sladr {

namespace {

std::array<double, 3> q2_1d(double s) {
  return {0.5 * s * (s - 1.0), 1.0 - s * s, 0.5 * s * (s + 1.0)};
}

std::array<double, 3> q2_1d_derivative(double s) { return {s - 0.5, -2.0 * s, s + 0.5}; }

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// angle of d in [0, 2 pi)
double angle_of(Vec2 d) {
  double a = std::atan2(d.y, d.x);
  if (a < 0.0) a += kTwoPi;
  return a;
}

}  // namespace

std::array<double, 9> q2_shape(double xi, double eta) {
  const auto a = q2_1d(xi);
  const auto b = q2_1d(eta);
  std::array<double, 9> n{};
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) n[i + 3 * j] = a[i] * b[j];
  return n;
}

Vec2 GhostElement::map(double xi, double eta) const {
  const auto n = q2_shape(xi, eta);
  Vec2 p{};
  for (int k = 0; k < 9; ++k) p += n[k] * nodes[k];
  return p;
}

std::array<double, 2> GhostElement::inverse_map(Vec2 p) const {
  double xi = 0.0, eta = 0.0;
  const double scale = distance(nodes[0], nodes[8]);
  for (int it = 0; it < 50; ++it) {
    const auto a = q2_1d(xi), b = q2_1d(eta);
    const auto da = q2_1d_derivative(xi), db = q2_1d_derivative(eta);
    Vec2 x{}, dxi{}, deta{};
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) {
        const Vec2 v = nodes[i + 3 * j];
        x += a[i] * b[j] * v;
        dxi += da[i] * b[j] * v;
        deta += a[i] * db[j] * v;
      }
    }
    const Vec2 r = p - x;
    const double det = cross(dxi, deta);
    if (det == 0.0) break;
    const double sx = cross(r, deta) / det;
    const double sy = cross(dxi, r) / det;
    xi += sx;
    eta += sy;
    if (std::hypot(sx, sy) <= 1e-14 && norm(r) <= 1e-13 * (1.0 + scale)) return {xi, eta};
    if (norm(r) <= 1e-15 * (1.0 + scale)) return {xi, eta};
  }
  const Vec2 back = map(xi, eta);
  if (distance(back, p) <= 1e-10 * (1.0 + scale)) return {xi, eta};
  throw Error("ghost element inverse map did not converge");
}

double ghost_layer_size(double dt, double c_h) {
  if (!(dt > 0.0) || !(c_h > 0.0)) throw Error("ghost layer size needs dt > 0 and c_h > 0");
  return c_h * std::sqrt(dt);
}

GhostLayer build_ghost_layer(const Domain& domain, double h) {
  if (domain.periodic()) throw Error("ghost layer is undefined on a periodic domain");
  const Rect& box = domain.box;
  if (!(h > 0.0)) throw Error("ghost layer size must be positive");
  if (h > 0.5 * std::min(box.width(), box.height())) {
    throw Error("ghost layer size " + std::to_string(h) + " exceeds half the domain thickness");
  }
  GhostLayer layer;
  layer.h = h;
  layer.domain = domain;

  const auto on_outer = [&](Vec2 v) {
    const double tol = 1e-12 * std::max(box.width(), box.height());
    return std::abs(v.x - box.xmin) <= tol || std::abs(v.x - box.xmax) <= tol ||
           std::abs(v.y - box.ymin) <= tol || std::abs(v.y - box.ymax) <= tol;
  };

  // (origin, along, inward) frames for each side
  struct Frame {
    GhostElement::Side side;
    Vec2 origin;
    Vec2 along;
    Vec2 inward;
    double length;
  };
  const std::array<Frame, 4> frames{
      Frame{GhostElement::Side::Bottom, {box.xmin, box.ymin}, {1, 0}, {0, 1}, box.width()},
      Frame{GhostElement::Side::Right, {box.xmax, box.ymin}, {0, 1}, {-1, 0}, box.height()},
      Frame{GhostElement::Side::Top, {box.xmin, box.ymax}, {1, 0}, {0, -1}, box.width()},
      Frame{GhostElement::Side::Left, {box.xmin, box.ymin}, {0, 1}, {1, 0}, box.height()}};

  // wall layers and the hole ring split the clearance between the hole and each wall
  const auto clearance = [&](const Frame& f) {
    if (!domain.hole) return std::numeric_limits<double>::infinity();
    const Vec2 c = domain.hole->center;
    const Vec2 d = c - f.origin;
    return d.x * f.inward.x + d.y * f.inward.y - domain.hole->radius;
  };
  for (const auto& f : frames) {
    const double th = std::min(h, 0.45 * clearance(f));
    const auto count = std::max<long>(1, std::lround(f.length / h));
    const double w = f.length / static_cast<double>(count);
    for (long e = 0; e < count; ++e) {
      GhostElement el;
      el.side = f.side;
      el.lo = static_cast<double>(e) * w;
      el.hi = e + 1 == count ? f.length : static_cast<double>(e + 1) * w;
      for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) {
          const double s = el.lo + 0.5 * static_cast<double>(i) * (el.hi - el.lo);
          const Vec2 v = f.origin + s * f.along + (0.5 * static_cast<double>(j) * th) * f.inward;
          el.nodes[i + 3 * j] = v;
          el.on_boundary[i + 3 * j] = on_outer(v);
        }
      }
      el.center = el.nodes[4];
      layer.elements.push_back(el);
    }
  }

  if (domain.hole) {
    const Vec2 c = domain.hole->center;
    const double r0 = domain.hole->radius;
    const double gap = std::min({c.x - box.xmin, box.xmax - c.x, c.y - box.ymin, box.ymax - c.y}) - r0;
    if (!(gap > 0.0)) throw Error("hole must lie strictly inside the rectangle");
    const double ring = std::min(h, 0.45 * gap);
    const auto count = std::max<long>(8, static_cast<long>(std::ceil(kTwoPi * (r0 + 0.5 * ring) / ring)));
    const double dtheta = kTwoPi / static_cast<double>(count);
    for (long e = 0; e < count; ++e) {
      GhostElement el;
      el.side = GhostElement::Side::Hole;
      el.lo = static_cast<double>(e) * dtheta;
      el.hi = static_cast<double>(e + 1) * dtheta;
      for (int j = 0; j < 3; ++j) {
        const double r = r0 + 0.5 * static_cast<double>(j) * ring;
        for (int i = 0; i < 3; ++i) {
          const double a = el.lo + 0.5 * static_cast<double>(i) * dtheta;
          el.nodes[i + 3 * j] = c + r * Vec2{std::cos(a), std::sin(a)};
          el.on_boundary[i + 3 * j] = j == 0;
        }
      }
      el.center = el.map(0.0, 0.0);
      layer.elements.push_back(el);
    }
  }
  return layer;
}

std::size_t GhostLayer::select_element(Vec2 p) const {
  const Rect& box = domain.box;
  const double scale = std::max(box.width(), box.height());
  const double tol = 1e-9 * scale;
  const bool near_hole =
      domain.hole && distance(p, domain.hole->center) <= domain.hole->radius + tol;
  const double hole_angle = near_hole ? angle_of(p - domain.hole->center) : 0.0;

  std::size_t best = elements.size();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const GhostElement& el = elements[e];
    bool hit = false;
    switch (el.side) {
      case GhostElement::Side::Bottom:
        hit = std::abs(p.y - box.ymin) <= tol && p.x - box.xmin >= el.lo - tol &&
              p.x - box.xmin <= el.hi + tol;
        break;
      case GhostElement::Side::Top:
        hit = std::abs(p.y - box.ymax) <= tol && p.x - box.xmin >= el.lo - tol &&
              p.x - box.xmin <= el.hi + tol;
        break;
      case GhostElement::Side::Left:
        hit = std::abs(p.x - box.xmin) <= tol && p.y - box.ymin >= el.lo - tol &&
              p.y - box.ymin <= el.hi + tol;
        break;
      case GhostElement::Side::Right:
        hit = std::abs(p.x - box.xmax) <= tol && p.y - box.ymin >= el.lo - tol &&
              p.y - box.ymin <= el.hi + tol;
        break;
      case GhostElement::Side::Hole: {
        if (!near_hole) break;
        const double atol = 1e-9;
        hit = (hole_angle >= el.lo - atol && hole_angle <= el.hi + atol) ||
              (el.hi >= kTwoPi - atol && hole_angle <= atol) ||
              (el.lo <= atol && hole_angle >= kTwoPi - atol);
        break;
      }
    }
    if (!hit) continue;
    const double d = distance(p, el.center);
    if (d < best_d) {
      best_d = d;
      best = e;
    }
  }
  if (best == elements.size()) {
    throw Error("projection (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                ") is not covered by any ghost element");
  }
  return best;
}

GhostValues populate_ghost(const GhostLayer& layer, const GridFunction& c, const Interpolator& interp,
                           const ProblemSpec::BoundaryFn& b, double t_n) {
  const std::size_t S = c.n_species();
  GhostValues out;
  out.n_species = S;
  out.values.assign(layer.node_count() * S, 0.0);
  parallel_for(layer.node_count(), [&](std::size_t idx) {
    const GhostElement& el = layer.elements[idx / 9];
    const int k = static_cast<int>(idx % 9);
    const Vec2 v = el.nodes[k];
    double* dst = out.values.data() + idx * S;
    if (el.on_boundary[k]) {
      for (std::size_t s = 0; s < S; ++s) dst[s] = b(v, t_n, s);
      return;
    }
    Stencil st;
    if (!interp.stencil(v, st)) {
      throw Error("ghost node (" + std::to_string(v.x) + ", " + std::to_string(v.y) +
                  ") lies outside the discrete domain");
    }
    for (std::size_t s = 0; s < S; ++s) dst[s] = st.apply(c, s);
  });
  return out;
}

void extrapolate_q2(const GhostLayer& layer, const GhostValues& values, Vec2 z, Vec2 projection,
                    std::span<double> out) {
  const std::size_t e = layer.select_element(projection);
  const auto ref = layer.elements[e].inverse_map(z);
  const auto n = q2_shape(ref[0], ref[1]);
  for (std::size_t s = 0; s < out.size(); ++s) {
    double v = 0.0;
    for (int k = 0; k < 9; ++k) v += n[k] * values(e, k, s);
    out[s] = v;
  }
}

double extrapolate_q2(const GhostLayer& layer, const GhostValues& values, const Interpolator& interp,
                      Vec2 z, std::size_t species) {
  std::vector<double> all(values.n_species);
  extrapolate_q2(layer, values, z, interp.project(z), all);
  return all.at(species);
}

}  // namespace sladr

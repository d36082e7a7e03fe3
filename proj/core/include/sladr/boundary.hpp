#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sladr/geometry.hpp"
#include "sladr/grid_function.hpp"
#include "sladr/interp.hpp"
#include "sladr/model.hpp"

namespace sladr {

/// One Q2 element of the ghost layer. Nodes are tensor ordered
/// (i + 3 j, i along the boundary, j inward); the j = 0 side lies on the
/// boundary.
struct GhostElement {
  enum class Side { Bottom, Right, Top, Left, Hole };

  std::array<Vec2, 9> nodes{};
  std::array<bool, 9> on_boundary{};
  Vec2 center{};
  Side side = Side::Bottom;
  // boundary footprint: coordinate range along the side, or angle range for the hole
  double lo = 0.0;
  double hi = 0.0;

  /// Physical point of reference coordinates (xi, eta) in [-1, 1]^2.
  Vec2 map(double xi, double eta) const;
  /// Reference coordinates of p by Newton iteration; p may lie outside.
  std::array<double, 2> inverse_map(Vec2 p) const;
};

/// Biquadratic shape functions at (xi, eta), tensor ordered.
std::array<double, 9> q2_shape(double xi, double eta);

struct GhostLayer {
  std::vector<GhostElement> elements;
  double h = 0.0;
  Domain domain;

  std::size_t node_count() const { return elements.size() * 9; }
  /// Element used to extrapolate at an exterior point whose projection is p.
  std::size_t select_element(Vec2 projection) const;
};

/// Layer thickness c_h * sqrt(dt).
double ghost_layer_size(double dt, double c_h = 1.5);

/// Single layer of elements along each rectangle side (round(L / h) per side,
/// overlapping at the corners) plus a ring around the hole, if any. The ring
/// is thinned when the hole sits closer than h to the outer boundary.
GhostLayer build_ghost_layer(const Domain& domain, double h);

/// Values at every ghost node, stored at (element * 9 + node) * S + s.
struct GhostValues {
  std::size_t n_species = 1;
  std::vector<double> values;

  double operator()(std::size_t element, int node, std::size_t s) const {
    return values[(element * 9 + static_cast<std::size_t>(node)) * n_species + s];
  }
};

/// Boundary nodes take b(v, t_n); the rest interpolate c^n. Throws Error
/// when an interior node lies outside the discrete domain.
GhostValues populate_ghost(const GhostLayer& layer, const GridFunction& c, const Interpolator& interp,
                           const ProblemSpec::BoundaryFn& b, double t_n);

/// Q2 extrapolation at exterior point z whose projection onto the discrete
/// domain is `projection`. Writes one value per species.
void extrapolate_q2(const GhostLayer& layer, const GhostValues& values, Vec2 z, Vec2 projection,
                    std::span<double> out);

/// Convenience overload for a single species, projecting through `interp`.
double extrapolate_q2(const GhostLayer& layer, const GhostValues& values, const Interpolator& interp,
                      Vec2 z, std::size_t species = 0);

}  // namespace sladr

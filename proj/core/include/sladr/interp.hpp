#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sladr/geometry.hpp"
#include "sladr/grid_function.hpp"
#include "sladr/mesh.hpp"

namespace sladr {

enum class InterpKind { Bicubic, P1, P2, Cubic1D };

std::string to_string(InterpKind kind);

/// Lagrange weights of the cubic through nodes -1, 0, 1, 2 evaluated at t.
std::array<double, 4> cubic_lagrange_weights(double t);

/// Dof indices and weights whose dot product with dof values gives the
/// interpolated value at one point.
struct Stencil {
  std::array<std::uint32_t, 16> index{};
  std::array<double, 16> weight{};
  int size = 0;

  void push(std::uint32_t i, double w) {
    index[size] = i;
    weight[size] = w;
    ++size;
  }
  double apply(const GridFunction& c, std::size_t species) const {
    double v = 0.0;
    for (int k = 0; k < size; ++k) v += weight[k] * c(index[k], species);
    return v;
  }
};

/// Piecewise polynomial interpolation I_p on the dofs of a mesh.
class Interpolator {
 public:
  virtual ~Interpolator() = default;

  virtual InterpKind kind() const = 0;
  virtual int degree() const = 0;
  virtual std::size_t dof_count() const = 0;
  virtual Vec2 dof(std::size_t i) const = 0;
  /// True for dofs on the Dirichlet boundary (never for periodic grids).
  virtual bool is_boundary_dof(std::size_t i) const = 0;
  /// True when every axis is periodic, so no point is ever outside.
  virtual bool periodic() const = 0;
  /// Reduces p along periodic axes; identity otherwise.
  virtual Vec2 wrap(Vec2 p) const = 0;
  /// Cell containing p (after wrapping), or -1 when p lies outside.
  virtual std::int64_t locate(Vec2 p) const = 0;
  /// Stencil for p inside a cell previously returned by locate.
  virtual void stencil_in_cell(Vec2 p, std::int64_t cell, Stencil& out) const = 0;
  /// Closest point of the discrete domain boundary.
  virtual Vec2 project(Vec2 p) const = 0;
  virtual Rect bounds() const = 0;
  /// Smallest mesh spacing, used for reporting Courant numbers.
  virtual double spacing() const = 0;

  bool contains(Vec2 p) const { return locate(p) >= 0; }
  /// Fills `out` for p and returns true, or returns false when p lies outside.
  bool stencil(Vec2 p, Stencil& out) const {
    const std::int64_t cell = locate(p);
    if (cell < 0) return false;
    stencil_in_cell(p, cell, out);
    return true;
  }
};

/// Tensor cubic Lagrange on the 4x4 node stencil around the query cell.
class BicubicInterpolator final : public Interpolator {
 public:
  explicit BicubicInterpolator(StructuredGrid grid);

  const StructuredGrid& grid() const { return grid_; }

  InterpKind kind() const override { return InterpKind::Bicubic; }
  int degree() const override { return 3; }
  std::size_t dof_count() const override { return grid_.node_count(); }
  Vec2 dof(std::size_t i) const override { return grid_.node(i); }
  bool is_boundary_dof(std::size_t i) const override { return grid_.is_boundary_node(i); }
  bool periodic() const override { return grid_.periodic(); }
  Vec2 wrap(Vec2 p) const override { return grid_.wrap(p); }
  std::int64_t locate(Vec2 p) const override { return grid_.contains(p) ? 0 : -1; }
  void stencil_in_cell(Vec2 p, std::int64_t cell, Stencil& out) const override;
  Vec2 project(Vec2 p) const override { return grid_.bounds().clamp(grid_.wrap(p)); }
  Rect bounds() const override { return grid_.bounds(); }
  double spacing() const override { return std::min(grid_.dx(), grid_.dy()); }

 private:
  StructuredGrid grid_;
};

/// P1 or P2 Lagrange interpolation on a triangulation.
class TriInterpolator final : public Interpolator {
 public:
  TriInterpolator(std::shared_ptr<const TriMesh> mesh, int degree);

  const TriMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const TriMesh> mesh_ptr() const { return mesh_; }

  InterpKind kind() const override { return degree_ == 1 ? InterpKind::P1 : InterpKind::P2; }
  int degree() const override { return degree_; }
  std::size_t dof_count() const override {
    return degree_ == 1 ? mesh_->vertex_count() : mesh_->p2_dof_count();
  }
  Vec2 dof(std::size_t i) const override { return mesh_->dof_coords()[i]; }
  bool is_boundary_dof(std::size_t i) const override { return mesh_->is_boundary_p2_dof(i); }
  bool periodic() const override { return false; }
  Vec2 wrap(Vec2 p) const override { return p; }
  std::int64_t locate(Vec2 p) const override;
  void stencil_in_cell(Vec2 p, std::int64_t cell, Stencil& out) const override;
  Vec2 project(Vec2 p) const override { return mesh_->project_onto_domain(p); }
  Rect bounds() const override { return mesh_->bounding_box(); }
  double spacing() const override { return mesh_->max_edge_length(); }

 private:
  std::shared_ptr<const TriMesh> mesh_;
  int degree_;
};

/// P2 shape functions on barycentric coordinates: vertices, then the
/// midpoint of the edge opposite vertex k.
std::array<double, 6> p2_shape(const std::array<double, 3>& bary);

/// I_p[c](p) for one species. Throws OutsideDomain when p is outside.
double interp_eval(const Interpolator& interp, const GridFunction& c, Vec2 p, std::size_t species);

/// Uniform periodic 1D grid with n nodes x0 + i * L / n.
struct PeriodicGrid1D {
  double x0 = 0.0;
  double length = 1.0;
  std::size_t n = 1;

  double h() const { return length / static_cast<double>(n); }
  double node(std::size_t i) const { return x0 + static_cast<double>(i) * h(); }
};

/// Cardinal cubic Lagrange weights of the periodic grid at x.
Stencil cubic1d_stencil(const PeriodicGrid1D& grid, double x);

/// Dense matrix with b_ij = psi_j(feet[i]).
Eigen::MatrixXd assemble_interp_matrix_1d(const PeriodicGrid1D& grid, std::span<const double> feet);

/// Largest singular value by power iteration on B^T B.
double spectral_norm(const Eigen::MatrixXd& b, int max_iter = 500, double tol = 1e-12);

}  // namespace sladr

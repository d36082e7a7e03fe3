#include "sladr/interp.hpp"

#include <algorithm>
#include <cmath>

#include "sladr/error.hpp"

namespace sladr {

std::string to_string(InterpKind kind) {
  switch (kind) {
    case InterpKind::Bicubic: return "bicubic";
    case InterpKind::P1: return "p1";
    case InterpKind::P2: return "p2";
    case InterpKind::Cubic1D: return "cubic1d";
  }
  return "unknown";
}

std::array<double, 4> cubic_lagrange_weights(double t) {
  const double tm = t + 1.0;
  const double t1 = t - 1.0;
  const double t2 = t - 2.0;
  return {-t * t1 * t2 / 6.0, tm * t1 * t2 / 2.0, -tm * t * t2 / 2.0, tm * t * t1 / 6.0};
}

namespace {

// First stencil node and local coordinate along one axis. The local
// coordinate is measured from node start + 1.
struct AxisStencil {
  long start;
  double t;
};

AxisStencil axis_stencil(double x, double xmin, double h, std::size_t ncell, bool periodic) {
  const double s = (x - xmin) / h;
  auto cell = static_cast<long>(std::floor(s));
  const long n = static_cast<long>(ncell);
  if (periodic) {
    cell = std::clamp<long>(cell, 0, n - 1);
    return {cell - 1, s - static_cast<double>(cell)};
  }
  cell = std::clamp<long>(cell, 0, n - 1);
  // shift one-sidedly near the edges so all four nodes exist
  const long start = std::clamp<long>(cell - 1, 0, std::max<long>(n - 3, 0));
  return {start, s - static_cast<double>(start + 1)};
}

}  // namespace

BicubicInterpolator::BicubicInterpolator(StructuredGrid grid) : grid_(std::move(grid)) {
  if ((!grid_.periodic_x() && grid_.nx() < 3) || (!grid_.periodic_y() && grid_.ny() < 3) ||
      grid_.nx() < 4 || grid_.ny() < 4) {
    throw Error("bicubic interpolation needs at least 4 cells per axis");
  }
}

void BicubicInterpolator::stencil_in_cell(Vec2 p, std::int64_t, Stencil& out) const {
  p = grid_.wrap(p);
  const Rect& b = grid_.bounds();
  const AxisStencil ax = axis_stencil(p.x, b.xmin, grid_.dx(), grid_.nx(), grid_.periodic_x());
  const AxisStencil ay = axis_stencil(p.y, b.ymin, grid_.dy(), grid_.ny(), grid_.periodic_y());
  const auto wx = cubic_lagrange_weights(ax.t);
  const auto wy = cubic_lagrange_weights(ay.t);
  const long nxn = static_cast<long>(grid_.nodes_x());
  const long nyn = static_cast<long>(grid_.nodes_y());

  out.size = 0;
  for (int j = 0; j < 4; ++j) {
    long jj = ay.start + j;
    if (grid_.periodic_y()) jj = ((jj % nyn) + nyn) % nyn;
    for (int i = 0; i < 4; ++i) {
      long ii = ax.start + i;
      if (grid_.periodic_x()) ii = ((ii % nxn) + nxn) % nxn;
      out.push(static_cast<std::uint32_t>(jj * nxn + ii), wx[i] * wy[j]);
    }
  }
}

std::array<double, 6> p2_shape(const std::array<double, 3>& l) {
  return {l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
          4.0 * l[1] * l[2],         4.0 * l[2] * l[0],         4.0 * l[0] * l[1]};
}

TriInterpolator::TriInterpolator(std::shared_ptr<const TriMesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree) {
  if (!mesh_) throw Error("TriInterpolator: null mesh");
  if (degree_ != 1 && degree_ != 2) throw Error("TriInterpolator: degree must be 1 or 2");
}

std::int64_t TriInterpolator::locate(Vec2 p) const {
  const auto loc = mesh_->locate(p);
  return loc ? static_cast<std::int64_t>(loc->triangle) : -1;
}

void TriInterpolator::stencil_in_cell(Vec2 p, std::int64_t cell, Stencil& out) const {
  const auto t = static_cast<std::size_t>(cell);
  const auto bary = mesh_->barycentric(t, p);
  const auto& tri = mesh_->triangles()[t];
  out.size = 0;
  if (degree_ == 1) {
    for (int k = 0; k < 3; ++k) out.push(tri[k], bary[k]);
    return;
  }
  const auto n = p2_shape(bary);
  const auto nv = static_cast<std::uint32_t>(mesh_->vertex_count());
  for (int k = 0; k < 3; ++k) out.push(tri[k], n[k]);
  for (int k = 0; k < 3; ++k) out.push(nv + mesh_->triangle_edge(t, k), n[3 + k]);
}

double interp_eval(const Interpolator& interp, const GridFunction& c, Vec2 p, std::size_t species) {
  Stencil s;
  if (!interp.stencil(p, s)) {
    throw OutsideDomain("interpolation point (" + std::to_string(p.x) + ", " +
                        std::to_string(p.y) + ") lies outside the domain");
  }
  return s.apply(c, species);
}

Stencil cubic1d_stencil(const PeriodicGrid1D& grid, double x) {
  const AxisStencil a = axis_stencil(
      grid.x0 + std::fmod(std::fmod(x - grid.x0, grid.length) + grid.length, grid.length), grid.x0,
      grid.h(), grid.n, true);
  const auto w = cubic_lagrange_weights(a.t);
  const long n = static_cast<long>(grid.n);
  Stencil s;
  for (int i = 0; i < 4; ++i) {
    const long ii = (((a.start + i) % n) + n) % n;
    s.push(static_cast<std::uint32_t>(ii), w[i]);
  }
  return s;
}

Eigen::MatrixXd assemble_interp_matrix_1d(const PeriodicGrid1D& grid, std::span<const double> feet) {
  if (grid.n < 4) throw Error("cubic 1D interpolation needs at least 4 nodes");
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(feet.size()),
                                            static_cast<Eigen::Index>(grid.n));
  for (std::size_t i = 0; i < feet.size(); ++i) {
    const Stencil s = cubic1d_stencil(grid, feet[i]);
    for (int k = 0; k < s.size; ++k) b(static_cast<Eigen::Index>(i), s.index[k]) += s.weight[k];
  }
  return b;
}

double spectral_norm(const Eigen::MatrixXd& b, int max_iter, double tol) {
  if (b.size() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(b.cols());
  // a deterministic non-symmetric start avoids orthogonality to the top vector
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += 0.1 * std::sin(1.0 + static_cast<double>(i));
  v.normalize();
  double sigma2 = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = b.transpose() * (b * v);
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    if (std::abs(next - sigma2) <= tol * next) {
      sigma2 = next;
      break;
    }
    sigma2 = next;
  }
  return std::sqrt(sigma2);
}

}  // namespace sladr

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sladr/geometry.hpp"

namespace sladr {

/// Uniform node-centred Cartesian grid. Node (i, j) sits at
/// (xmin + i dx, ymin + j dy). Along a periodic axis node `n` is identified
/// with node 0 and only n nodes are stored; otherwise n + 1 nodes are stored.
class StructuredGrid {
 public:
  StructuredGrid(Rect bounds, std::size_t nx, std::size_t ny, bool periodic_x = false,
                 bool periodic_y = false);

  /// Grid with the cell count per axis chosen as round(extent / spacing).
  static StructuredGrid with_spacing(Rect bounds, double spacing, bool periodic);

  const Rect& bounds() const { return bounds_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  bool periodic_x() const { return periodic_x_; }
  bool periodic_y() const { return periodic_y_; }
  bool periodic() const { return periodic_x_ && periodic_y_; }

  std::size_t nodes_x() const { return periodic_x_ ? nx_ : nx_ + 1; }
  std::size_t nodes_y() const { return periodic_y_ ? ny_ : ny_ + 1; }
  std::size_t node_count() const { return nodes_x() * nodes_y(); }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nodes_x() + i; }
  Vec2 node(std::size_t i, std::size_t j) const {
    return {bounds_.xmin + static_cast<double>(i) * dx_,
            bounds_.ymin + static_cast<double>(j) * dy_};
  }
  Vec2 node(std::size_t idx) const { return node(idx % nodes_x(), idx / nodes_x()); }

  /// Reduces coordinates along periodic axes into [min, max).
  Vec2 wrap(Vec2 p) const;
  /// True when p (after wrapping) lies in the closed rectangle.
  bool contains(Vec2 p) const;
  /// True for nodes on a non-periodic edge of the rectangle.
  bool is_boundary_node(std::size_t idx) const;

 private:
  Rect bounds_;
  std::size_t nx_;
  std::size_t ny_;
  double dx_;
  double dy_;
  bool periodic_x_;
  bool periodic_y_;
};

/// Containing triangle and barycentric coordinates of a located point.
struct Location {
  std::uint32_t triangle = 0;
  std::array<double, 3> bary{};
};

/// Slack on barycentric sign tests.
inline constexpr double kLocateTolerance = 1e-10;

/// Conforming triangulation with P2 degrees of freedom. Dofs are numbered
/// vertices first, then one midpoint per unique edge. Immutable after
/// construction.
class TriMesh {
 public:
  struct Edge {
    std::array<std::uint32_t, 2> vertices{};  // sorted ascending
    std::array<std::int32_t, 2> triangles{-1, -1};
  };

  /// Validates orientation, connectivity and vertex usage; throws ParseError
  /// naming the offending triangle or vertex.
  TriMesh(std::vector<Vec2> vertices, std::vector<std::array<std::uint32_t, 3>> triangles);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<std::uint32_t, 3>>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Edge ids lying on the boundary of the polygonal domain, ascending.
  const std::vector<std::uint32_t>& boundary_edges() const { return boundary_edges_; }
  /// Edge id opposite local vertex k of triangle t.
  std::uint32_t triangle_edge(std::size_t t, int k) const { return triangle_edges_[t][k]; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  std::size_t p2_dof_count() const { return vertices_.size() + edges_.size(); }
  const std::vector<Vec2>& dof_coords() const { return dof_coords_; }
  bool is_boundary_vertex(std::size_t v) const { return boundary_vertex_[v] != 0; }
  bool is_boundary_p2_dof(std::size_t dof) const;

  double triangle_area(std::size_t t) const;
  double total_area() const;
  double max_edge_length() const { return max_edge_; }
  const Rect& bounding_box() const { return bbox_; }

  /// Containing triangle of p, or nullopt when p is outside the polygonal domain.
  std::optional<Location> locate(Vec2 p) const;
  /// Closest point on the boundary polyline (ties go to the lowest edge id).
  Vec2 project_onto_domain(Vec2 p) const;
  /// Barycentric coordinates of p with respect to triangle t.
  std::array<double, 3> barycentric(std::size_t t, Vec2 p) const;

 private:
  void build_edges();
  void build_bins();

  std::vector<Vec2> vertices_;
  std::vector<std::array<std::uint32_t, 3>> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<std::uint32_t, 3>> triangle_edges_;
  std::vector<std::uint32_t> boundary_edges_;
  std::vector<char> boundary_vertex_;
  std::vector<Vec2> dof_coords_;
  Rect bbox_;
  double max_edge_ = 0.0;

  // uniform background bins for point location
  double bin_size_ = 1.0;
  std::size_t bins_x_ = 1;
  std::size_t bins_y_ = 1;
  std::vector<std::uint32_t> bin_start_;
  std::vector<std::uint32_t> bin_items_;
};

/// Structured triangulation of a rectangle: each cell of an n x m grid is
/// split along its (+,+) diagonal, with the grid chosen so that the longest
/// edge does not exceed target_h.
TriMesh gen_square_trimesh(const Rect& bounds, double target_h);

/// Delaunay triangulation of a rectangle with one circular hole. Spacing is
/// h_far away from the hole and grades down to h_near on the hole boundary.
TriMesh gen_channel_trimesh(const Rect& bounds, const Disk& hole, double h_far, double h_near);

/// Parses the text mesh format: `NV NT`, NV lines `x y`, NT lines `i j k`.
/// `#` starts a comment.
TriMesh parse_trimesh(std::istream& in);
TriMesh read_trimesh(const std::string& path);
void write_trimesh(std::ostream& out, const TriMesh& mesh);

}  // namespace sladr

#include "sladr/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "sladr/error.hpp"

namespace sladr {

// ---------------------------------------------------------------------------
// StructuredGrid

StructuredGrid::StructuredGrid(Rect bounds, std::size_t nx, std::size_t ny, bool periodic_x,
                               bool periodic_y)
    : bounds_(bounds), nx_(nx), ny_(ny), periodic_x_(periodic_x), periodic_y_(periodic_y) {
  if (nx == 0 || ny == 0) throw Error("structured grid needs at least one cell per axis");
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) {
    throw Error("structured grid bounds must have positive extent");
  }
  dx_ = bounds.width() / static_cast<double>(nx);
  dy_ = bounds.height() / static_cast<double>(ny);
}

StructuredGrid StructuredGrid::with_spacing(Rect bounds, double spacing, bool periodic) {
  if (!(spacing > 0.0)) throw Error("grid spacing must be positive");
  const auto nx = static_cast<std::size_t>(std::llround(bounds.width() / spacing));
  const auto ny = static_cast<std::size_t>(std::llround(bounds.height() / spacing));
  return StructuredGrid(bounds, std::max<std::size_t>(nx, 1), std::max<std::size_t>(ny, 1),
                        periodic, periodic);
}

namespace {
double wrap_coordinate(double v, double lo, double period) {
  double r = std::fmod(v - lo, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;  // fmod rounding can land exactly on the period
  return lo + r;
}
}  // namespace

Vec2 StructuredGrid::wrap(Vec2 p) const {
  if (periodic_x_) p.x = wrap_coordinate(p.x, bounds_.xmin, bounds_.width());
  if (periodic_y_) p.y = wrap_coordinate(p.y, bounds_.ymin, bounds_.height());
  return p;
}

bool StructuredGrid::contains(Vec2 p) const {
  p = wrap(p);
  const double tx = 1e-12 * bounds_.width();
  const double ty = 1e-12 * bounds_.height();
  const bool in_x = periodic_x_ || (p.x >= bounds_.xmin - tx && p.x <= bounds_.xmax + tx);
  const bool in_y = periodic_y_ || (p.y >= bounds_.ymin - ty && p.y <= bounds_.ymax + ty);
  return in_x && in_y;
}

bool StructuredGrid::is_boundary_node(std::size_t idx) const {
  const std::size_t i = idx % nodes_x();
  const std::size_t j = idx / nodes_x();
  const bool bx = !periodic_x_ && (i == 0 || i == nx_);
  const bool by = !periodic_y_ && (j == 0 || j == ny_);
  return bx || by;
}

// ---------------------------------------------------------------------------
// TriMesh

TriMesh::TriMesh(std::vector<Vec2> vertices, std::vector<std::array<std::uint32_t, 3>> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  if (vertices_.empty()) throw ParseError("mesh has no vertices");
  if (triangles_.empty()) throw ParseError("mesh has no triangles");

  std::vector<char> used(vertices_.size(), 0);
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (auto v : triangles_[t]) {
      if (v >= vertices_.size()) {
        throw ParseError("triangle " + std::to_string(t) + " references vertex " +
                         std::to_string(v) + " out of range");
      }
      used[v] = 1;
    }
    const auto& tri = triangles_[t];
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw ParseError("triangle " + std::to_string(t) + " repeats a vertex");
    }
    const double a = triangle_area(t);
    if (!(a > 0.0)) {
      throw ParseError("triangle " + std::to_string(t) +
                       (a < 0.0 ? " is inverted (negative area)" : " is degenerate (zero area)"));
    }
  }
  for (std::size_t v = 0; v < used.size(); ++v) {
    if (!used[v]) throw ParseError("vertex " + std::to_string(v) + " is not used by any triangle");
  }

  bbox_ = {vertices_[0].x, vertices_[0].x, vertices_[0].y, vertices_[0].y};
  for (const auto& p : vertices_) {
    bbox_.xmin = std::min(bbox_.xmin, p.x);
    bbox_.xmax = std::max(bbox_.xmax, p.x);
    bbox_.ymin = std::min(bbox_.ymin, p.y);
    bbox_.ymax = std::max(bbox_.ymax, p.y);
  }

  build_edges();
  build_bins();
}

void TriMesh::build_edges() {
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> lookup;
  triangle_edges_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      std::uint32_t a = tri[(k + 1) % 3];
      std::uint32_t b = tri[(k + 2) % 3];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = lookup.try_emplace({a, b}, static_cast<std::uint32_t>(edges_.size()));
      if (inserted) {
        Edge e;
        e.vertices = {a, b};
        e.triangles = {static_cast<std::int32_t>(t), -1};
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        if (e.triangles[1] != -1) {
          throw ParseError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                           ") is shared by more than two triangles (triangle " +
                           std::to_string(t) + ")");
        }
        e.triangles[1] = static_cast<std::int32_t>(t);
      }
      triangle_edges_[t][k] = it->second;
    }
  }

  boundary_vertex_.assign(vertices_.size(), 0);
  for (std::uint32_t e = 0; e < edges_.size(); ++e) {
    if (edges_[e].triangles[1] == -1) {
      boundary_edges_.push_back(e);
      boundary_vertex_[edges_[e].vertices[0]] = 1;
      boundary_vertex_[edges_[e].vertices[1]] = 1;
    }
  }

  dof_coords_ = vertices_;
  dof_coords_.reserve(vertices_.size() + edges_.size());
  max_edge_ = 0.0;
  for (const auto& e : edges_) {
    const Vec2 a = vertices_[e.vertices[0]];
    const Vec2 b = vertices_[e.vertices[1]];
    dof_coords_.push_back(0.5 * (a + b));
    max_edge_ = std::max(max_edge_, distance(a, b));
  }
}

void TriMesh::build_bins() {
  bin_size_ = 2.0 * max_edge_;
  const double w = std::max(bbox_.width(), 1e-300);
  const double h = std::max(bbox_.height(), 1e-300);
  // cap the bin count so degenerate aspect ratios do not explode memory
  bins_x_ = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(w / bin_size_)), 1, 4096);
  bins_y_ = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(h / bin_size_)), 1, 4096);

  const auto bin_range = [&](double lo, double hi, double origin, double extent, std::size_t n) {
    const double scale = static_cast<double>(n) / extent;
    auto a = static_cast<long>(std::floor((lo - origin) * scale));
    auto b = static_cast<long>(std::floor((hi - origin) * scale));
    a = std::clamp<long>(a, 0, static_cast<long>(n) - 1);
    b = std::clamp<long>(b, 0, static_cast<long>(n) - 1);
    return std::pair<std::size_t, std::size_t>(static_cast<std::size_t>(a),
                                               static_cast<std::size_t>(b));
  };

  std::vector<std::uint32_t> counts(bins_x_ * bins_y_ + 1, 0);
  auto visit = [&](auto&& fn) {
    for (std::uint32_t t = 0; t < triangles_.size(); ++t) {
      const auto& tri = triangles_[t];
      double x0 = vertices_[tri[0]].x, x1 = x0, y0 = vertices_[tri[0]].y, y1 = y0;
      for (int k = 1; k < 3; ++k) {
        x0 = std::min(x0, vertices_[tri[k]].x);
        x1 = std::max(x1, vertices_[tri[k]].x);
        y0 = std::min(y0, vertices_[tri[k]].y);
        y1 = std::max(y1, vertices_[tri[k]].y);
      }
      const auto [ia, ib] = bin_range(x0, x1, bbox_.xmin, w, bins_x_);
      const auto [ja, jb] = bin_range(y0, y1, bbox_.ymin, h, bins_y_);
      for (std::size_t j = ja; j <= jb; ++j)
        for (std::size_t i = ia; i <= ib; ++i) fn(j * bins_x_ + i, t);
    }
  };
  visit([&](std::size_t b, std::uint32_t) { ++counts[b + 1]; });
  for (std::size_t b = 1; b < counts.size(); ++b) counts[b] += counts[b - 1];
  bin_start_ = counts;
  bin_items_.resize(counts.back());
  std::vector<std::uint32_t> fill(counts.begin(), counts.end() - 1);
  visit([&](std::size_t b, std::uint32_t t) { bin_items_[fill[b]++] = t; });
}

double TriMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles_[t];
  return 0.5 * cross(vertices_[tri[1]] - vertices_[tri[0]], vertices_[tri[2]] - vertices_[tri[0]]);
}

double TriMesh::total_area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) a += triangle_area(t);
  return a;
}

bool TriMesh::is_boundary_p2_dof(std::size_t dof) const {
  if (dof < vertices_.size()) return boundary_vertex_[dof] != 0;
  return edges_[dof - vertices_.size()].triangles[1] == -1;
}

std::array<double, 3> TriMesh::barycentric(std::size_t t, Vec2 p) const {
  const auto& tri = triangles_[t];
  const Vec2 a = vertices_[tri[0]];
  const Vec2 b = vertices_[tri[1]];
  const Vec2 c = vertices_[tri[2]];
  const double det = cross(b - a, c - a);
  const double l1 = cross(p - a, c - a) / det;
  const double l2 = cross(b - a, p - a) / det;
  return {1.0 - l1 - l2, l1, l2};
}

std::optional<Location> TriMesh::locate(Vec2 p) const {
  const double slack = 1e-12 * std::max(bbox_.width(), bbox_.height());
  if (!bbox_.contains(p, slack)) return std::nullopt;
  const double w = std::max(bbox_.width(), 1e-300);
  const double h = std::max(bbox_.height(), 1e-300);
  auto i = static_cast<long>(std::floor((p.x - bbox_.xmin) * static_cast<double>(bins_x_) / w));
  auto j = static_cast<long>(std::floor((p.y - bbox_.ymin) * static_cast<double>(bins_y_) / h));
  i = std::clamp<long>(i, 0, static_cast<long>(bins_x_) - 1);
  j = std::clamp<long>(j, 0, static_cast<long>(bins_y_) - 1);
  const std::size_t b = static_cast<std::size_t>(j) * bins_x_ + static_cast<std::size_t>(i);

  std::optional<Location> best;
  double best_min = -std::numeric_limits<double>::infinity();
  for (std::uint32_t k = bin_start_[b]; k < bin_start_[b + 1]; ++k) {
    const std::uint32_t t = bin_items_[k];
    const auto l = barycentric(t, p);
    const double m = std::min({l[0], l[1], l[2]});
    if (m >= -kLocateTolerance && m > best_min) {
      best_min = m;
      best = Location{t, l};
      if (m > kLocateTolerance) break;  // strictly interior: no other triangle can contain p
    }
  }
  return best;
}

Vec2 TriMesh::project_onto_domain(Vec2 p) const {
  if (boundary_edges_.empty()) throw Error("mesh has no boundary edges; projection undefined");
  Vec2 best{};
  double best_d = std::numeric_limits<double>::infinity();
  for (auto e : boundary_edges_) {
    const Vec2 q = closest_point_on_segment(p, vertices_[edges_[e].vertices[0]],
                                            vertices_[edges_[e].vertices[1]]);
    const double d = distance(p, q);
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

struct LineReader {
  std::istream& in;
  std::size_t line_no = 0;

  // next non-empty line with comments stripped
  bool next(std::string& out) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        out = line;
        return true;
      }
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("mesh line " + std::to_string(line_no) + ": " + msg);
  }
};

template <typename... T>
bool parse_exact(const std::string& line, T&... values) {
  std::istringstream ss(line);
  ((ss >> values), ...);
  if (ss.fail()) return false;
  std::string rest;
  return !(ss >> rest);
}

}  // namespace

TriMesh parse_trimesh(std::istream& in) {
  LineReader reader{in};
  std::string line;
  if (!reader.next(line)) throw ParseError("mesh file is empty");
  long long nv = 0, nt = 0;
  if (!parse_exact(line, nv, nt) || nv < 0 || nt < 0) reader.fail("expected header `NV NT`");
  if (nt == 0) reader.fail("element list is empty");

  std::vector<Vec2> vertices(static_cast<std::size_t>(nv));
  for (auto& v : vertices) {
    if (!reader.next(line)) reader.fail("unexpected end of file in vertex list");
    if (!parse_exact(line, v.x, v.y)) reader.fail("expected vertex `x y`");
  }
  std::vector<std::array<std::uint32_t, 3>> triangles(static_cast<std::size_t>(nt));
  for (auto& t : triangles) {
    long long a = 0, b = 0, c = 0;
    if (!reader.next(line)) reader.fail("unexpected end of file in element list");
    if (!parse_exact(line, a, b, c)) reader.fail("expected element `i j k`");
    for (long long v : {a, b, c}) {
      if (v < 0 || v >= nv) reader.fail("vertex index " + std::to_string(v) + " out of range");
    }
    t = {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
         static_cast<std::uint32_t>(c)};
  }
  if (reader.next(line)) reader.fail("trailing content after element list");
  return TriMesh(std::move(vertices), std::move(triangles));
}

TriMesh read_trimesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file '" + path + "'");
  return parse_trimesh(in);
}

void write_trimesh(std::ostream& out, const TriMesh& mesh) {
  out << mesh.vertex_count() << ' ' << mesh.triangle_count() << '\n';
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices()) out << v.x << ' ' << v.y << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace sladr

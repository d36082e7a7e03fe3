#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "sladr/error.hpp"
#include "sladr/mesh.hpp"

namespace sladr {

TriMesh gen_square_trimesh(const Rect& bounds, double target_h) {
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) {
    throw Error("gen_square_trimesh: degenerate bounds");
  }
  if (!(target_h > 0.0)) throw Error("gen_square_trimesh: target_h must be positive");
  if (target_h > std::min(bounds.width(), bounds.height())) {
    throw Error("gen_square_trimesh: target_h exceeds the domain extent");
  }
  // cell legs of at most target_h / sqrt(2) keep the diagonal below target_h
  const double leg = target_h / std::numbers::sqrt2;
  const auto n = static_cast<std::size_t>(std::ceil(bounds.width() / leg - 1e-9));
  const auto m = static_cast<std::size_t>(std::ceil(bounds.height() / leg - 1e-9));
  const double hx = bounds.width() / static_cast<double>(n);
  const double hy = bounds.height() / static_cast<double>(m);

  std::vector<Vec2> vertices;
  vertices.reserve((n + 1) * (m + 1));
  for (std::size_t j = 0; j <= m; ++j) {
    for (std::size_t i = 0; i <= n; ++i) {
      // pin the last row/column to the exact bounds
      const double x = i == n ? bounds.xmax : bounds.xmin + static_cast<double>(i) * hx;
      const double y = j == m ? bounds.ymax : bounds.ymin + static_cast<double>(j) * hy;
      vertices.push_back({x, y});
    }
  }
  std::vector<std::array<std::uint32_t, 3>> triangles;
  triangles.reserve(2 * n * m);
  const auto id = [n](std::size_t i, std::size_t j) {
    return static_cast<std::uint32_t>(j * (n + 1) + i);
  };
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      triangles.push_back({a, b, c});
      triangles.push_back({a, c, d});
    }
  }
  return TriMesh(std::move(vertices), std::move(triangles));
}

namespace {

struct Circle {
  Vec2 center;
  double r2 = 0.0;
};

Circle circumcircle(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 ab = b - a;
  const Vec2 ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double ab2 = dot(ab, ab);
  const double ac2 = dot(ac, ac);
  const Vec2 off{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
  return {a + off, dot(off, off)};
}

// Bowyer-Watson insertion with brute-force cavity search; adequate for the
// few thousand points the channel mesh needs.
std::vector<std::array<std::uint32_t, 3>> delaunay(std::vector<Vec2>& pts, const Rect& box) {
  const std::size_t n = pts.size();
  const double span = std::max(box.width(), box.height());
  const Vec2 mid{0.5 * (box.xmin + box.xmax), 0.5 * (box.ymin + box.ymax)};
  const double big = 100.0 * span;
  pts.push_back(mid + Vec2{-big, -big});
  pts.push_back(mid + Vec2{big, -big});
  pts.push_back(mid + Vec2{0.0, big});

  struct Tri {
    std::array<std::uint32_t, 3> v;
    Circle cc;
  };
  std::vector<Tri> tris;
  const auto make = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    return Tri{{a, b, c}, circumcircle(pts[a], pts[b], pts[c])};
  };
  tris.push_back(make(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n + 1),
                      static_cast<std::uint32_t>(n + 2)));

  std::vector<Tri> keep;
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> cavity_edges;
  for (std::uint32_t p = 0; p < n; ++p) {
    const Vec2 q = pts[p];
    keep.clear();
    cavity_edges.clear();
    for (const auto& t : tris) {
      const Vec2 d = q - t.cc.center;
      if (dot(d, d) < t.cc.r2 * (1.0 - 1e-12)) {
        for (int k = 0; k < 3; ++k) {
          std::uint32_t a = t.v[k], b = t.v[(k + 1) % 3];
          // count undirected edges, remember orientation of the first visit
          auto key = std::minmax(a, b);
          auto [it, inserted] = cavity_edges.try_emplace({key.first, key.second}, a == key.first ? 1 : -1);
          if (!inserted) it->second = 0;
        }
      } else {
        keep.push_back(t);
      }
    }
    tris.swap(keep);
    for (const auto& [e, orient] : cavity_edges) {
      if (orient == 0) continue;
      const std::uint32_t a = orient > 0 ? e.first : e.second;
      const std::uint32_t b = orient > 0 ? e.second : e.first;
      tris.push_back(make(a, b, p));
    }
  }

  std::vector<std::array<std::uint32_t, 3>> out;
  out.reserve(tris.size());
  for (const auto& t : tris) {
    if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
    out.push_back(t.v);
  }
  pts.resize(n);
  return out;
}

}  // namespace

TriMesh gen_channel_trimesh(const Rect& bounds, const Disk& hole, double h_far, double h_near) {
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) {
    throw Error("gen_channel_trimesh: degenerate bounds");
  }
  if (!(h_far > 0.0) || !(h_near > 0.0) || h_near > h_far) {
    throw Error("gen_channel_trimesh: need 0 < h_near <= h_far");
  }
  const double r0 = hole.radius;
  if (!(r0 > 0.0)) throw Error("gen_channel_trimesh: hole radius must be positive");
  const Vec2 c = hole.center;
  if (c.x - r0 <= bounds.xmin || c.x + r0 >= bounds.xmax || c.y - r0 <= bounds.ymin ||
      c.y + r0 >= bounds.ymax) {
    throw Error("gen_channel_trimesh: hole must lie strictly inside the rectangle");
  }

  constexpr double grading = 0.3;
  const auto size_at = [&](Vec2 p) {
    return std::min(h_far, h_near + grading * std::max(0.0, distance(p, c) - r0));
  };

  std::vector<Vec2> pts;
  // accepted points, with a coarse proximity check
  const auto too_close = [&](Vec2 p, double s) {
    for (const auto& q : pts) {
      if (distance(p, q) < 0.6 * s) return true;
    }
    return false;
  };

  // rectangle boundary, graded by the size function
  const std::array<Vec2, 4> corners{Vec2{bounds.xmin, bounds.ymin}, Vec2{bounds.xmax, bounds.ymin},
                                    Vec2{bounds.xmax, bounds.ymax}, Vec2{bounds.xmin, bounds.ymax}};
  for (int side = 0; side < 4; ++side) {
    const Vec2 a = corners[side];
    const Vec2 b = corners[(side + 1) % 4];
    const double len = distance(a, b);
    std::vector<double> ts{0.0};
    double step = 0.0;
    while (true) {
      step = size_at(a + (ts.back() / len) * (b - a));
      if (ts.back() + step >= len) break;
      ts.push_back(ts.back() + step);
    }
    // rescale so the march ends exactly on the next corner
    double end = ts.back() + step;
    if (ts.size() > 1 && len - ts.back() < 0.5 * step) {
      end = ts.back();
      ts.pop_back();
    }
    const double scale = len / end;
    for (double t : ts) pts.push_back(a + (t * scale / len) * (b - a));
  }

  // hole boundary and graded rings
  const auto ring = [&](double r, double s, bool force) {
    const auto k = std::max<std::size_t>(
        8, static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi * r / s)));
    for (std::size_t i = 0; i < k; ++i) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(k);
      const Vec2 p = c + r * Vec2{std::cos(a), std::sin(a)};
      if (!force) {
        if (!bounds.contains(p, -0.5 * s) || too_close(p, s)) continue;
      }
      pts.push_back(p);
    }
  };
  ring(r0, h_near, true);
  double r = r0;
  double s = h_near;
  while (s < h_far) {
    r += s;
    s = size_at(c + Vec2{r, 0.0});
    ring(r, s, false);
  }

  // background triangular lattice
  const double dy = h_far * std::sqrt(3.0) / 2.0;
  const auto rows = static_cast<long>(std::floor(bounds.height() / dy));
  for (long j = 1; j <= rows; ++j) {
    const double y = bounds.ymin + static_cast<double>(j) * dy;
    const double shift = (j % 2 == 0) ? 0.0 : 0.5 * h_far;
    for (double x = bounds.xmin + shift; x < bounds.xmax; x += h_far) {
      const Vec2 p{x, y};
      if (!bounds.contains(p, -0.5 * h_far)) continue;
      if (distance(p, c) < r + 0.5 * h_far) continue;
      if (too_close(p, size_at(p))) continue;
      pts.push_back(p);
    }
  }

  auto tris = delaunay(pts, bounds);
  std::vector<std::array<std::uint32_t, 3>> kept;
  kept.reserve(tris.size());
  for (auto t : tris) {
    const Vec2 g = (1.0 / 3.0) * (pts[t[0]] + pts[t[1]] + pts[t[2]]);
    if (distance(g, c) < r0) continue;
    if (cross(pts[t[1]] - pts[t[0]], pts[t[2]] - pts[t[0]]) <= 1e-14 * h_near * h_near) continue;
    kept.push_back(t);
  }

  // drop vertices that ended up unused (none expected) and renumber
  std::vector<std::int64_t> remap(pts.size(), -1);
  std::vector<Vec2> verts;
  for (auto& t : kept) {
    for (auto& v : t) {
      if (remap[v] < 0) {
        remap[v] = static_cast<std::int64_t>(verts.size());
        verts.push_back(pts[v]);
      }
      v = static_cast<std::uint32_t>(remap[v]);
    }
  }
  TriMesh mesh(std::move(verts), std::move(kept));

  // a missing hull triangle would show up as an area deficit
  const std::size_t k_hole = std::max<std::size_t>(
      8, static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi * r0 / h_near)));
  const double polygon_hole =
      0.5 * static_cast<double>(k_hole) * r0 * r0 *
      std::sin(2.0 * std::numbers::pi / static_cast<double>(k_hole));
  const double expected = bounds.area() - polygon_hole;
  if (std::abs(mesh.total_area() - expected) > 1e-9 * bounds.area()) {
    throw Error("gen_channel_trimesh: triangulation does not cover the domain");
  }
  return mesh;
}

}  // namespace sladr

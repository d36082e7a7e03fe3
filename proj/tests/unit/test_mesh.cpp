#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "sladr/error.hpp"
#include "sladr/mesh.hpp"

using namespace sladr;

namespace {

TriMesh split_square() {
  return TriMesh({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, {{0, 1, 2}, {0, 2, 3}});
}

TriMesh parse(const std::string& text) {
  std::istringstream in(text);
  return parse_trimesh(in);
}

}  // namespace

TEST(StructuredGrid, NodeCoordinatesAndCounts) {
  const StructuredGrid g({-2, 2, -1, 1}, 8, 4);
  EXPECT_DOUBLE_EQ(g.dx(), 0.5);
  EXPECT_DOUBLE_EQ(g.dy(), 0.5);
  EXPECT_EQ(g.node_count(), 9u * 5u);
  const Vec2 p = g.node(3, 2);
  EXPECT_DOUBLE_EQ(p.x, -0.5);
  EXPECT_DOUBLE_EQ(p.y, 0.0);
  EXPECT_EQ(g.index(3, 2), 2u * 9u + 3u);
  EXPECT_TRUE(g.is_boundary_node(g.index(0, 2)));
  EXPECT_FALSE(g.is_boundary_node(g.index(3, 2)));
}

TEST(StructuredGrid, PeriodicStoresOneCopyOfTheSeam) {
  const StructuredGrid g({0, 1, 0, 1}, 10, 10, true, true);
  EXPECT_EQ(g.node_count(), 100u);
  const Vec2 w = g.wrap({1.25, -0.25});
  EXPECT_NEAR(w.x, 0.25, 1e-15);
  EXPECT_NEAR(w.y, 0.75, 1e-15);
  for (std::size_t i = 0; i < g.node_count(); ++i) EXPECT_FALSE(g.is_boundary_node(i));
}

TEST(StructuredGrid, RejectsEmptyExtent) {
  EXPECT_THROW(StructuredGrid({0, 0, 0, 1}, 4, 4), Error);
  EXPECT_THROW(StructuredGrid({0, 1, 0, 1}, 0, 4), Error);
}

TEST(TriMesh, SplitSquareHasNineP2Dofs) {
  const TriMesh m = split_square();
  EXPECT_EQ(m.vertex_count(), 4u);
  EXPECT_EQ(m.edges().size(), 5u);
  EXPECT_EQ(m.p2_dof_count(), 9u);
  EXPECT_EQ(m.boundary_edges().size(), 4u);
  EXPECT_NEAR(m.total_area(), 4.0, 1e-14);
}

TEST(TriMesh, MidpointDofsAreSharedAcrossTriangles) {
  const TriMesh m = split_square();
  // the diagonal is the only interior edge
  int interior = 0;
  for (const auto& e : m.edges()) {
    if (e.triangles[1] >= 0) ++interior;
  }
  EXPECT_EQ(interior, 1);
  EXPECT_EQ(m.triangle_edge(0, 1), m.triangle_edge(1, 2));
}

TEST(TriMesh, LocateCentroidAndVertex) {
  const TriMesh m = split_square();
  const Vec2 c{(-1.0 + 1.0 + 1.0) / 3.0, (-1.0 - 1.0 + 1.0) / 3.0};
  const auto loc = m.locate(c);
  ASSERT_TRUE(loc);
  EXPECT_EQ(loc->triangle, 0u);
  for (double b : loc->bary) EXPECT_NEAR(b, 1.0 / 3.0, 1e-14);

  const auto at_vertex = m.locate({1, 1});
  ASSERT_TRUE(at_vertex);
  EXPECT_NEAR(*std::max_element(at_vertex->bary.begin(), at_vertex->bary.end()), 1.0, 1e-14);

  EXPECT_FALSE(m.locate({3, 0}));
  EXPECT_FALSE(m.locate({1.0 + 1e-6, 0.0}));
}

TEST(TriMesh, LocateReconstructsInteriorPoints) {
  const TriMesh m = gen_square_trimesh({-2, 2, -2, 2}, 0.3);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    const Vec2 p{u(rng), u(rng)};
    const auto loc = m.locate(p);
    ASSERT_TRUE(loc);
    const auto& t = m.triangles()[loc->triangle];
    Vec2 q{};
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
      EXPECT_GE(loc->bary[i], -kLocateTolerance);
      q += loc->bary[i] * m.vertices()[t[i]];
      sum += loc->bary[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_NEAR(q.x, p.x, 1e-12 * 2.0);
    EXPECT_NEAR(q.y, p.y, 1e-12 * 2.0);
  }
}

TEST(TriMesh, ProjectionExamples) {
  const TriMesh m = split_square();
  const Vec2 a = m.project_onto_domain({1.2, 0.3});
  EXPECT_NEAR(a.x, 1.0, 1e-15);
  EXPECT_NEAR(a.y, 0.3, 1e-15);
  const Vec2 b = m.project_onto_domain({1.2, 1.2});
  EXPECT_NEAR(b.x, 1.0, 1e-15);
  EXPECT_NEAR(b.y, 1.0, 1e-15);
  const Vec2 c = m.project_onto_domain({1.0, -0.4});
  EXPECT_NEAR(c.x, 1.0, 1e-15);
  EXPECT_NEAR(c.y, -0.4, 1e-15);
}

TEST(TriMesh, ProjectionIsNoFartherThanAnyBoundarySample) {
  const TriMesh m = gen_channel_trimesh({0, 1, 0, 0.4}, {{0.1, 0.2}, 0.05}, 0.05, 0.013);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  std::vector<Vec2> samples;
  for (int k = 0; k < 1000; ++k) {
    const auto e = m.boundary_edges()[rng() % m.boundary_edges().size()];
    const auto& ed = m.edges()[e];
    const Vec2 a = m.vertices()[ed.vertices[0]];
    const Vec2 b = m.vertices()[ed.vertices[1]];
    samples.push_back(a + pick(rng) * (b - a));
  }
  std::uniform_real_distribution<double> ux(-0.3, 1.3), uy(-0.3, 0.7);
  for (int k = 0; k < 50; ++k) {
    const Vec2 p{ux(rng), uy(rng)};
    const double d = distance(p, m.project_onto_domain(p));
    for (const Vec2& q : samples) EXPECT_LE(d, distance(p, q) + 1e-14);
  }
}

TEST(TriMesh, RejectsInvertedTriangleNamingIt) {
  try {
    TriMesh({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {{0, 1, 2}, {1, 2, 3}});
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("triangle 1"), std::string::npos) << e.what();
  }
}

TEST(TriMesh, RejectsDanglingVertexAndBadIndices) {
  EXPECT_THROW(TriMesh({{0, 0}, {1, 0}, {0, 1}, {5, 5}}, {{0, 1, 2}}), ParseError);
  EXPECT_THROW(TriMesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 7}}), ParseError);
  EXPECT_THROW(TriMesh({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}), ParseError);
}

TEST(MeshIo, ParsesCommentsAndRoundTrips) {
  const TriMesh m = parse(
      "# split square\n4 2\n-1 -1\n1 -1\n1 1  # corner\n-1 1\n0 1 2\n0 2 3\n");
  EXPECT_EQ(m.p2_dof_count(), 9u);
  std::ostringstream out;
  write_trimesh(out, m);
  const TriMesh again = parse(out.str());
  EXPECT_EQ(again.vertices(), m.vertices());
  EXPECT_EQ(again.triangles(), m.triangles());
}

TEST(MeshIo, RejectsMalformedFiles) {
  EXPECT_THROW(parse("3 0\n0 0\n1 0\n0 1\n"), ParseError);
  EXPECT_THROW(parse("3 1\n0 0\n1 0\n"), ParseError);
  EXPECT_THROW(parse("3 1\n0 0\n1 0\n0 1\n0 2 1\n"), ParseError);
  EXPECT_THROW(parse("3 1\n0 0\n1 0\n0 1\n0 1 2\nextra\n"), ParseError);
  EXPECT_THROW(read_trimesh("/nonexistent/mesh.txt"), ParseError);
}

TEST(GenSquare, SplitsEveryCellInTwo) {
  const double h = std::sqrt(2.0) / 4.0;
  const TriMesh m = gen_square_trimesh({0, 1, 0, 1}, h);
  EXPECT_EQ(m.triangle_count(), 2u * 4u * 4u);
  EXPECT_EQ(m.vertex_count(), 25u);
}

TEST(GenSquare, EdgesBoundedAndAreaConserved) {
  const TriMesh m = gen_square_trimesh({-2, 2, -2, 2}, 0.04);
  EXPECT_LE(m.max_edge_length(), 0.04 + 1e-12);
  EXPECT_NEAR(m.total_area(), 16.0, 1e-10);
}

TEST(GenSquare, RejectsBadInput) {
  EXPECT_THROW(gen_square_trimesh({0, 0, 0, 1}, 0.1), Error);
  EXPECT_THROW(gen_square_trimesh({0, 1, 0, 1}, 0.0), Error);
  EXPECT_THROW(gen_square_trimesh({0, 1, 0, 1}, 2.0), Error);
}

TEST(GenSquare, Deterministic) {
  const TriMesh a = gen_square_trimesh({-1, 1, -1, 1}, 0.1);
  const TriMesh b = gen_square_trimesh({-1, 1, -1, 1}, 0.1);
  EXPECT_EQ(a.vertices(), b.vertices());
  EXPECT_EQ(a.triangles(), b.triangles());
}

TEST(GenChannel, CoversTheBoxMinusThePolygonalHole) {
  const Disk hole{{0.1, 0.2}, 0.05};
  const TriMesh m = gen_channel_trimesh({0, 1, 0, 0.4}, hole, 0.05, 0.013);
  EXPECT_LT(m.total_area(), 0.4);
  EXPECT_GT(m.total_area(), 0.4 - 3.2 * 0.05 * 0.05);
  EXPECT_FALSE(m.locate(hole.center));
  EXPECT_TRUE(m.locate({0.5, 0.2}));
  // hole boundary vertices sit on the circle
  std::size_t on_circle = 0;
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    if (std::abs(distance(m.vertices()[v], hole.center) - hole.radius) < 1e-12) {
      ++on_circle;
      EXPECT_TRUE(m.is_boundary_vertex(v));
    }
  }
  EXPECT_GE(on_circle, 24u);
}

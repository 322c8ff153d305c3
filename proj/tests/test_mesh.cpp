#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "plate/errors.hpp"
#include "plate/mesh.hpp"

using namespace plate;

namespace {

void expect_valid(const Mesh& m) {
  EXPECT_TRUE(is_conforming(m));
  for (int t = 0; t < m.num_triangles(); ++t)
    EXPECT_GT(m.area(t), 0.0);
  double area = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t)
    area += m.area(t);
  EXPECT_NEAR(area, 1.0, 1e-12);
  std::vector<int> count(m.num_edges(), 0);
  for (int t = 0; t < m.num_triangles(); ++t)
    for (int e : m.triangle_edges(t))
      ++count[e];
  for (int e = 0; e < m.num_edges(); ++e)
    EXPECT_EQ(count[e], m.edge(e).is_boundary() ? 1 : 2);
  for (int i = 0; i < m.num_segments(); ++i)
    for (int t = 0; t < m.num_triangles(); ++t)
      for (int v : m.triangle(t))
        if (v == m.corners()[i])
          EXPECT_GE(m.corner_size(i), m.diameter(t));
}

} // namespace

TEST(Mesh, UnitSquareCounts) {
  const Mesh m1 = build_unit_square_mesh(1);
  EXPECT_EQ(m1.num_vertices(), 4);
  EXPECT_EQ(m1.num_triangles(), 2);
  EXPECT_EQ(m1.num_edges(), 5);
  EXPECT_EQ(m1.boundary_edges().size(), 4u);

  const Mesh m2 = build_unit_square_mesh(2);
  EXPECT_EQ(m2.num_vertices(), 9);
  EXPECT_EQ(m2.num_triangles(), 8);
  EXPECT_EQ(m2.num_edges(), 16);
  EXPECT_EQ(m2.num_vertices() - m2.num_edges() + m2.num_triangles(), 1);
  expect_valid(m1);
  expect_valid(m2);
}

TEST(Mesh, UnitSquareSizesAndTags) {
  const Mesh m = build_unit_square_mesh(4);
  for (int e : m.boundary_edges())
    EXPECT_NEAR(m.edge_length(e), 0.25, 1e-15);
  for (int t = 0; t < m.num_triangles(); ++t)
    EXPECT_NEAR(m.diameter(t), std::sqrt(2.0) / 4.0, 1e-15);
  const Eigen::Vector2d corners[] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  ASSERT_EQ(m.num_segments(), 4);
  for (int i = 0; i < 4; ++i)
    EXPECT_NEAR((m.vertex(m.corners()[i]) - corners[i]).norm(), 0.0, 1e-15);
  // bottom, right, top, left
  const Eigen::Vector2d normals[] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
  for (int e : m.boundary_edges())
    EXPECT_NEAR((m.outward_normal(e) - normals[m.edge(e).segment - 1]).norm(), 0.0, 1e-15);
}

TEST(Mesh, ZeroSubdivisionsRejected) { EXPECT_THROW(build_unit_square_mesh(0), InvalidArgument); }

TEST(Mesh, UniformRefineQuadrisects) {
  const Mesh m = build_unit_square_mesh(1);
  const Mesh r = uniform_refine(m);
  EXPECT_EQ(r.num_triangles(), 8);
  EXPECT_EQ(r.num_vertices(), 9);
  expect_valid(r);

  const Mesh m2 = build_unit_square_mesh(2);
  const Mesh r2 = uniform_refine(m2);
  EXPECT_EQ(r2.num_triangles(), 4 * m2.num_triangles());
  EXPECT_NEAR(r2.max_diameter(), m2.max_diameter() / 2.0, 1e-15);
  for (int e : r2.boundary_edges())
    EXPECT_GE(r2.edge(e).segment, 1);
}

TEST(Mesh, BisectEmptyMarkedIsIdentity) {
  const Mesh m = build_unit_square_mesh(2);
  const Mesh r = bisect_marked(m, {});
  EXPECT_EQ(r.vertices(), m.vertices());
  EXPECT_EQ(r.triangles(), m.triangles());
}

TEST(Mesh, BisectAllAtLeastDoubles) {
  const Mesh m = build_unit_square_mesh(2);
  std::vector<int> all(m.num_triangles());
  std::iota(all.begin(), all.end(), 0);
  const Mesh r = bisect_marked(m, all);
  EXPECT_GE(r.num_triangles(), 2 * m.num_triangles());
  expect_valid(r);
}

TEST(Mesh, BisectSingleTriangle) {
  const Mesh m = build_unit_square_mesh(2);
  const std::vector<int> one{3};
  const Mesh r = bisect_marked(m, one);
  expect_valid(r);
  EXPECT_GT(r.num_triangles(), m.num_triangles());
  // the marked triangle is gone: none of the output triangles has its vertex set
  auto key = [](Mesh::Triangle t) {
    std::sort(t.begin(), t.end());
    return t;
  };
  for (int t = 0; t < r.num_triangles(); ++t)
    EXPECT_NE(key(r.triangle(t)), key(m.triangle(3)));
  EXPECT_THROW(bisect_marked(m, std::vector<int>{99}), InvalidArgument);
}

TEST(Mesh, MinAngleBoundedOverTenRandomRounds) {
  std::mt19937 rng(7);
  Mesh m = build_unit_square_mesh(2);
  const double initial = min_angle(m);
  for (int round = 0; round < 10; ++round) {
    std::vector<int> marked;
    std::bernoulli_distribution pick(0.3);
    for (int t = 0; t < m.num_triangles(); ++t)
      if (pick(rng))
        marked.push_back(t);
    // focus half the rounds at a corner to force deep local refinement
    if (round % 2 == 0)
      for (int t = 0; t < m.num_triangles(); ++t)
        for (int v : m.triangle(t))
          if (v == m.corners()[0])
            marked.push_back(t);
    m = bisect_marked(m, marked);
    expect_valid(m);
    EXPECT_GE(min_angle(m), 0.5 * initial - 1e-12);
  }
}

TEST(Mesh, TagsSurviveRefinement) {
  Mesh m = uniform_refine(build_unit_square_mesh(2));
  m = bisect_marked(m, std::vector<int>{0, 5, 17});
  for (int e : m.boundary_edges()) {
    const Edge& ed = m.edge(e);
    const Eigen::Vector2d a = m.vertex(ed.v[0]), b = m.vertex(ed.v[1]);
    const Eigen::Vector2d mid = 0.5 * (a + b);
    switch (ed.segment) {
    case 1: EXPECT_NEAR(mid.y(), 0.0, 1e-15); break;
    case 2: EXPECT_NEAR(mid.x(), 1.0, 1e-15); break;
    case 3: EXPECT_NEAR(mid.y(), 1.0, 1e-15); break;
    case 4: EXPECT_NEAR(mid.x(), 0.0, 1e-15); break;
    default: ADD_FAILURE() << "untagged boundary edge";
    }
  }
  for (int i = 0; i < 4; ++i) {
    const auto [leave, arrive] = m.corner_edges(i);
    EXPECT_EQ(m.edge(leave).segment, i + 1);
    EXPECT_EQ(m.edge(arrive).segment, (i + 3) % 4 + 1);
  }
}

TEST(Mesh, InvalidMeshesRejected) {
  const Mesh m = build_unit_square_mesh(1);
  std::vector<Mesh::Triangle> flipped = m.triangles();
  std::swap(flipped[0][0], flipped[0][1]);
  EXPECT_THROW(Mesh(m.vertices(), flipped, m.boundary_tags(), m.corners()), InvalidArgument);
  std::vector<int> bad_corners = m.corners();
  bad_corners.pop_back();
  bad_corners.pop_back();
  EXPECT_THROW(Mesh(m.vertices(), m.triangles(), m.boundary_tags(), bad_corners), InvalidArgument);
}

TEST(Mesh, ExportHasBlocks) {
  std::ostringstream s;
  write_mesh(s, build_unit_square_mesh(1));
  const std::string out = s.str();
  EXPECT_NE(out.find("vertices 4"), std::string::npos);
  EXPECT_NE(out.find("triangles 2"), std::string::npos);
  EXPECT_NE(out.find("boundary 4"), std::string::npos);
}

#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace plate {

using Point2 = Eigen::Vector2d;

/// An edge of the triangulation. Vertex indices are stored sorted (v[0] < v[1]),
/// which fixes the global normal: the clockwise rotation of v[0] -> v[1].
struct Edge {
  std::array<int, 2> v{};
  std::array<int, 2> tri{-1, -1};   // incident triangles, tri[1] = -1 on the boundary
  std::array<int, 2> local{-1, -1}; // local edge number inside tri[k]
  int segment = 0;                  // boundary segment tag 1..m, 0 for interior edges

  bool is_boundary() const { return tri[1] < 0; }
};

/// Conforming triangle mesh of a polygonal domain.
///
/// Triangles are counterclockwise. The vertex order of every triangle also
/// carries the newest-vertex bisection label: (v0, v1) is the refinement edge
/// and v2 is the newest vertex. Local edge j joins v_j and v_{j+1}.
///
/// Boundary segment Gamma_i (tag i, 1-based) runs from corner c_i to c_{i+1};
/// corners are listed counterclockwise.
class Mesh {
public:
  using Triangle = std::array<int, 3>;
  using EdgeKey = std::pair<int, int>;

  Mesh() = default;

  /// Validates positivity, incidence, tag coverage and corner placement; throws InvalidArgument.
  Mesh(std::vector<Point2> vertices, std::vector<Triangle> triangles,
       std::map<EdgeKey, int> boundary_tags, std::vector<int> corners,
       std::vector<int> levels = {});

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& boundary_edges() const { return boundary_edges_; }
  const std::vector<int>& corners() const { return corners_; }
  const std::map<EdgeKey, int>& boundary_tags() const { return boundary_tags_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_segments() const { return static_cast<int>(corners_.size()); }

  const Point2& vertex(int i) const { return vertices_[i]; }
  const Triangle& triangle(int t) const { return triangles_[t]; }
  const Edge& edge(int e) const { return edges_[e]; }
  /// Edge indices of local edges 0, 1, 2.
  const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }
  int level(int t) const { return levels_[t]; }
  const std::vector<int>& levels() const { return levels_; }
  int find_edge(int a, int b) const;

  double area(int t) const;
  /// h_K: longest edge.
  double diameter(int t) const;
  /// h_E.
  double edge_length(int e) const;
  /// h_i = max h_K over triangles containing corner c_i (0-based index).
  double corner_size(int i) const;
  /// h = max h_K.
  double max_diameter() const;
  double domain_area() const;

  /// Outward unit normal of a boundary edge.
  Point2 outward_normal(int e) const;
  /// Global normal of an edge: clockwise rotation of the direction v[0] -> v[1].
  Point2 global_normal(int e) const;

  /// Boundary edges at corner i: {edge on Gamma_i (leaving c_i), edge on Gamma_{i-1} (arriving)}.
  std::pair<int, int> corner_edges(int i) const { return corner_edges_[i]; }

  /// Corner index (0-based) of a vertex, or -1.
  int corner_index(int vertex) const;

private:
  void build_topology();

  std::vector<Point2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<int> levels_;
  std::map<EdgeKey, int> boundary_tags_;
  std::vector<int> corners_;

  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<int> boundary_edges_;
  std::map<EdgeKey, int> edge_lookup_;
  std::vector<std::pair<int, int>> corner_edges_;
};

/// Structured mesh of [0,1]^2 with 2 n^2 triangles. Segments bottom/right/top/left
/// are Gamma_1..Gamma_4; corners (0,0), (1,0), (1,1), (0,1).
Mesh build_unit_square_mesh(int n);

/// Red refinement: every triangle split into 4 congruent children through edge midpoints.
Mesh uniform_refine(const Mesh& mesh);

/// Newest-vertex bisection of the marked triangles followed by conforming closure.
Mesh bisect_marked(const Mesh& mesh, std::span<const int> marked);

/// Smallest interior angle over all triangles, in radians.
double min_angle(const Mesh& mesh);

/// Incidence audit: 2 triangles per interior edge, 1 per boundary edge, boundary edges
/// carry a segment tag, and no vertex lies in the interior of an edge.
bool is_conforming(const Mesh& mesh);

/// Plain-text export: vertices, triangles, edges and boundary blocks.
void write_mesh(std::ostream& out, const Mesh& mesh);

} // namespace plate

#include "plate/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <string>

#include "plate/errors.hpp"

namespace plate {

namespace {

Mesh::EdgeKey key(int a, int b) { return a < b ? Mesh::EdgeKey{a, b} : Mesh::EdgeKey{b, a}; }

double signed_area(const Point2& a, const Point2& b, const Point2& c) {
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

// Rotate the triangle so that its longest edge becomes (v0, v1); keeps orientation.
Mesh::Triangle label_longest_edge(const std::vector<Point2>& p, Mesh::Triangle t) {
  int best = 0;
  double best_len = -1.0;
  for (int j = 0; j < 3; ++j) {
    const double len = (p[t[(j + 1) % 3]] - p[t[j]]).squaredNorm();
    if (len > best_len * (1.0 + 1e-12)) {
      best_len = len;
      best = j;
    }
  }
  return {t[best], t[(best + 1) % 3], t[(best + 2) % 3]};
}

} // namespace

Mesh::Mesh(std::vector<Point2> vertices, std::vector<Triangle> triangles,
           std::map<EdgeKey, int> boundary_tags, std::vector<int> corners,
           std::vector<int> levels)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)),
      levels_(std::move(levels)), boundary_tags_(std::move(boundary_tags)),
      corners_(std::move(corners)) {
  if (levels_.empty())
    levels_.assign(triangles_.size(), 0);
  if (levels_.size() != triangles_.size())
    throw InvalidArgument("mesh: level array does not match triangle count");
  if (corners_.size() < 3)
    throw InvalidArgument("mesh: a polygon needs at least 3 corners");
  build_topology();
}

void Mesh::build_topology() {
  const int nv = num_vertices();
  edges_.clear();
  edge_lookup_.clear();
  triangle_edges_.assign(triangles_.size(), {-1, -1, -1});

  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles_[t];
    for (int j = 0; j < 3; ++j) {
      if (tri[j] < 0 || tri[j] >= nv)
        throw InvalidArgument("mesh: triangle " + std::to_string(t) + " has an invalid vertex index");
    }
    const double a = signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
    if (!(a > 0.0))
      throw InvalidArgument("mesh: triangle " + std::to_string(t) + " is not counterclockwise or is degenerate");

    for (int j = 0; j < 3; ++j) {
      const auto k = key(tri[j], tri[(j + 1) % 3]);
      auto [it, inserted] = edge_lookup_.try_emplace(k, static_cast<int>(edges_.size()));
      if (inserted) {
        Edge e;
        e.v = {k.first, k.second};
        e.tri[0] = t;
        e.local[0] = j;
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        if (e.tri[1] >= 0)
          throw InvalidArgument("mesh: edge shared by more than two triangles");
        e.tri[1] = t;
        e.local[1] = j;
      }
      triangle_edges_[t][j] = it->second;
    }
  }

  boundary_edges_.clear();
  for (int e = 0; e < num_edges(); ++e) {
    Edge& edge = edges_[e];
    auto it = boundary_tags_.find({edge.v[0], edge.v[1]});
    if (edge.is_boundary()) {
      if (it == boundary_tags_.end())
        throw InvalidArgument("mesh: boundary edge (" + std::to_string(edge.v[0]) + "," +
                              std::to_string(edge.v[1]) + ") has no segment tag (hanging vertex?)");
      if (it->second < 1 || it->second > num_segments())
        throw InvalidArgument("mesh: segment tag out of range");
      edge.segment = it->second;
      boundary_edges_.push_back(e);
    } else if (it != boundary_tags_.end()) {
      throw InvalidArgument("mesh: interior edge carries a boundary tag");
    }
  }
  if (boundary_tags_.size() != boundary_edges_.size())
    throw InvalidArgument("mesh: boundary tag refers to a non-existent edge");

  const int m = num_segments();
  corner_edges_.assign(m, {-1, -1});
  for (int i = 0; i < m; ++i) {
    const int c = corners_[i];
    if (c < 0 || c >= nv)
      throw InvalidArgument("mesh: corner vertex out of range");
    const int leaving = i + 1;
    const int arriving = (i + m - 1) % m + 1;
    for (int e : boundary_edges_) {
      const Edge& edge = edges_[e];
      if (edge.v[0] != c && edge.v[1] != c)
        continue;
      if (edge.segment == leaving)
        corner_edges_[i].first = e;
      if (edge.segment == arriving)
        corner_edges_[i].second = e;
    }
    if (corner_edges_[i].first < 0 || corner_edges_[i].second < 0)
      throw InvalidArgument("mesh: corner " + std::to_string(i + 1) + " is not an endpoint of its segments");
  }
}

int Mesh::find_edge(int a, int b) const {
  auto it = edge_lookup_.find(key(a, b));
  return it == edge_lookup_.end() ? -1 : it->second;
}

double Mesh::area(int t) const {
  const auto& tri = triangles_[t];
  return signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double Mesh::diameter(int t) const {
  const auto& tri = triangles_[t];
  double h = 0.0;
  for (int j = 0; j < 3; ++j)
    h = std::max(h, (vertices_[tri[(j + 1) % 3]] - vertices_[tri[j]]).norm());
  return h;
}

double Mesh::edge_length(int e) const {
  return (vertices_[edges_[e].v[1]] - vertices_[edges_[e].v[0]]).norm();
}

double Mesh::corner_size(int i) const {
  const int c = corners_[i];
  double h = 0.0;
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles_[t];
    if (tri[0] == c || tri[1] == c || tri[2] == c)
      h = std::max(h, diameter(t));
  }
  return h;
}

double Mesh::max_diameter() const {
  double h = 0.0;
  for (int t = 0; t < num_triangles(); ++t)
    h = std::max(h, diameter(t));
  return h;
}

double Mesh::domain_area() const {
  double a = 0.0;
  for (int t = 0; t < num_triangles(); ++t)
    a += area(t);
  return a;
}

Point2 Mesh::global_normal(int e) const {
  const Point2 d = vertices_[edges_[e].v[1]] - vertices_[edges_[e].v[0]];
  return Point2(d.y(), -d.x()) / d.norm();
}

Point2 Mesh::outward_normal(int e) const {
  const Edge& edge = edges_[e];
  const auto& tri = triangles_[edge.tri[0]];
  const int j = edge.local[0];
  const Point2 d = vertices_[tri[(j + 1) % 3]] - vertices_[tri[j]];
  return Point2(d.y(), -d.x()) / d.norm();
}

int Mesh::corner_index(int vertex) const {
  auto it = std::find(corners_.begin(), corners_.end(), vertex);
  return it == corners_.end() ? -1 : static_cast<int>(it - corners_.begin());
}

Mesh build_unit_square_mesh(int n) {
  if (n < 1)
    throw InvalidArgument("build_unit_square_mesh: n must be >= 1");
  std::vector<Point2> v;
  v.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      v.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };

  std::vector<Mesh::Triangle> tris;
  tris.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int p00 = id(i, j), p10 = id(i + 1, j), p11 = id(i + 1, j + 1), p01 = id(i, j + 1);
      // hypotenuse p00-p11 is the refinement edge of both halves
      tris.push_back({p11, p00, p10});
      tris.push_back({p00, p11, p01});
    }
  }

  std::map<Mesh::EdgeKey, int> tags;
  for (int i = 0; i < n; ++i) {
    tags[key(id(i, 0), id(i + 1, 0))] = 1;
    tags[key(id(n, i), id(n, i + 1))] = 2;
    tags[key(id(i, n), id(i + 1, n))] = 3;
    tags[key(id(0, i), id(0, i + 1))] = 4;
  }
  std::vector<int> corners{id(0, 0), id(n, 0), id(n, n), id(0, n)};
  return Mesh(std::move(v), std::move(tris), std::move(tags), std::move(corners));
}

Mesh uniform_refine(const Mesh& mesh) {
  std::vector<Point2> v = mesh.vertices();
  std::vector<int> mid(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& ed = mesh.edge(e);
    mid[e] = static_cast<int>(v.size());
    v.push_back(0.5 * (mesh.vertex(ed.v[0]) + mesh.vertex(ed.v[1])));
  }

  std::vector<Mesh::Triangle> tris;
  std::vector<int> levels;
  tris.reserve(4 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& p = mesh.triangle(t);
    const auto& te = mesh.triangle_edges(t);
    const int m01 = mid[te[0]], m12 = mid[te[1]], m20 = mid[te[2]];
    for (const Mesh::Triangle& child : {Mesh::Triangle{p[0], m01, m20}, Mesh::Triangle{m01, p[1], m12},
                                        Mesh::Triangle{m20, m12, p[2]}, Mesh::Triangle{m12, m20, m01}}) {
      tris.push_back(label_longest_edge(v, child));
      levels.push_back(mesh.level(t) + 1);
    }
  }

  std::map<Mesh::EdgeKey, int> tags;
  for (int e : mesh.boundary_edges()) {
    const auto& ed = mesh.edge(e);
    tags[key(ed.v[0], mid[e])] = ed.segment;
    tags[key(mid[e], ed.v[1])] = ed.segment;
  }
  return Mesh(std::move(v), std::move(tris), std::move(tags), mesh.corners(), std::move(levels));
}

Mesh bisect_marked(const Mesh& mesh, std::span<const int> marked) {
  if (marked.empty())
    return mesh;

  std::vector<Point2> v = mesh.vertices();
  std::vector<Mesh::Triangle> tris = mesh.triangles();
  std::vector<int> levels = mesh.levels();
  std::map<Mesh::EdgeKey, int> tags = mesh.boundary_tags();
  std::map<Mesh::EdgeKey, int> midpoints;

  std::vector<char> flag(tris.size(), 0);
  for (int t : marked) {
    if (t < 0 || t >= mesh.num_triangles())
      throw InvalidArgument("bisect_marked: triangle index out of range");
    flag[t] = 1;
  }

  auto midpoint = [&](int a, int b) {
    const auto k = key(a, b);
    auto it = midpoints.find(k);
    if (it != midpoints.end())
      return it->second;
    const int m = static_cast<int>(v.size());
    v.push_back(0.5 * (v[a] + v[b]));
    midpoints.emplace(k, m);
    if (auto tag = tags.find(k); tag != tags.end()) {
      const int segment = tag->second;
      tags.erase(tag);
      tags[key(a, m)] = segment;
      tags[key(m, b)] = segment;
    }
    return m;
  };

  // Each sweep bisects flagged triangles and every triangle with a hanging
  // vertex on one of its edges; newest-vertex bisection guarantees the
  // sweeps stop once the mesh is conforming again.
  const std::size_t sweep_limit = 64 + 4 * tris.size();
  for (std::size_t sweep = 0;; ++sweep) {
    if (sweep > sweep_limit)
      throw InvalidArgument("bisect_marked: conformity closure did not terminate");
    bool changed = false;
    std::vector<Mesh::Triangle> next;
    std::vector<int> next_levels;
    next.reserve(tris.size() + 16);
    next_levels.reserve(tris.size() + 16);
    for (std::size_t t = 0; t < tris.size(); ++t) {
      const auto& tri = tris[t];
      bool split = flag[t] != 0;
      for (int j = 0; j < 3 && !split; ++j)
        split = midpoints.count(key(tri[j], tri[(j + 1) % 3])) > 0;
      if (!split) {
        next.push_back(tri);
        next_levels.push_back(levels[t]);
        continue;
      }
      const int a = tri[0], b = tri[1], c = tri[2];
      const int m = midpoint(a, b);
      next.push_back({c, a, m});
      next.push_back({b, c, m});
      next_levels.push_back(levels[t] + 1);
      next_levels.push_back(levels[t] + 1);
      changed = true;
    }
    tris = std::move(next);
    levels = std::move(next_levels);
    flag.assign(tris.size(), 0);
    if (!changed)
      break;
  }
  return Mesh(std::move(v), std::move(tris), std::move(tags), mesh.corners(), std::move(levels));
}

double min_angle(const Mesh& mesh) {
  double best = std::numbers::pi;
  for (const auto& tri : mesh.triangles()) {
    for (int j = 0; j < 3; ++j) {
      const Point2 a = mesh.vertex(tri[(j + 1) % 3]) - mesh.vertex(tri[j]);
      const Point2 b = mesh.vertex(tri[(j + 2) % 3]) - mesh.vertex(tri[j]);
      const double cosine = a.dot(b) / (a.norm() * b.norm());
      best = std::min(best, std::acos(std::clamp(cosine, -1.0, 1.0)));
    }
  }
  return best;
}

bool is_conforming(const Mesh& mesh) {
  std::map<Mesh::EdgeKey, int> count;
  for (const auto& tri : mesh.triangles())
    for (int j = 0; j < 3; ++j)
      ++count[key(tri[j], tri[(j + 1) % 3])];
  for (const auto& [k, c] : count) {
    const bool tagged = mesh.boundary_tags().count(k) > 0;
    if (c > 2 || (c == 1 && !tagged) || (c == 2 && tagged))
      return false;
  }
  return count.size() == static_cast<std::size_t>(mesh.num_edges());
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << std::setprecision(17);
  out << "vertices " << mesh.num_vertices() << '\n';
  for (const auto& p : mesh.vertices())
    out << p.x() << ' ' << p.y() << '\n';
  out << "triangles " << mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles())
    out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "edges " << mesh.num_edges() << '\n';
  for (const auto& e : mesh.edges())
    out << e.v[0] << ' ' << e.v[1] << '\n';
  out << "boundary " << mesh.boundary_edges().size() << '\n';
  for (int e : mesh.boundary_edges())
    out << e << ' ' << mesh.edge(e).segment << '\n';
  out << "corners " << mesh.num_segments() << '\n';
  for (int c : mesh.corners())
    out << c << '\n';
}

} // namespace plate

#pragma once

// Helpers shared by assembly and estimator.

#include <algorithm>
#include <vector>

#include "plate/argyris.hpp"
#include "plate/plate_model.hpp"
#include "plate/quadrature.hpp"

namespace plate::detail {

using Row21 = Eigen::Matrix<double, 1, kArgyrisDofs>;

struct EdgePoint {
  Eigen::Vector2d ref;
  Eigen::Vector2d x;
  double weight; // includes the edge length
};

/// Quadrature points on local edge j of triangle t, with the rule repeated on each
/// piece between the sorted breakpoints (parameters in (0, 1) along v_j -> v_{j+1}).
inline std::vector<EdgePoint> edge_points(const ArgyrisSpace& space, int t, int j, const QuadratureRule& rule,
                                          std::vector<double> breaks = {}) {
  const auto& verts = ArgyrisReferenceBasis::vertices();
  const Eigen::Vector2d ra = verts[j], rb = verts[(j + 1) % 3];
  const auto& tri = space.mesh().triangle(t);
  const double length = (space.mesh().vertex(tri[(j + 1) % 3]) - space.mesh().vertex(tri[j])).norm();

  std::sort(breaks.begin(), breaks.end());
  std::vector<double> cuts{0.0};
  for (double b : breaks)
    if (b > 1e-14 && b < 1.0 - 1e-14 && b > cuts.back())
      cuts.push_back(b);
  cuts.push_back(1.0);

  std::vector<EdgePoint> pts;
  pts.reserve(rule.size() * (cuts.size() - 1));
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], len = cuts[k + 1] - cuts[k];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double s = a + len * rule.points[q].x();
      const Eigen::Vector2d ref = ra + s * (rb - ra);
      pts.push_back({ref, space.to_physical(t, ref), rule.weights[q] * len * length});
    }
  }
  return pts;
}

inline std::vector<double> merge_breaks(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

/// Endpoints of local edge j of triangle t.
inline std::pair<Eigen::Vector2d, Eigen::Vector2d> edge_ends(const Mesh& mesh, int t, int j) {
  const auto& tri = mesh.triangle(t);
  return {mesh.vertex(tri[j]), mesh.vertex(tri[(j + 1) % 3])};
}

/// Trace functionals of the 21 local shape functions at one point.
struct TraceRows {
  Row21 w, dn, m_nn, m_ns, v_n;
};

inline TraceRows trace_rows(const BasisTable& table, const Material& mat, const Eigen::Vector2d& n) {
  TraceRows r;
  for (int k = 0; k < kArgyrisDofs; ++k) {
    Jet j;
    for (int i = 0; i < 15; ++i)
      j[i] = table(i, k);
    const TraceSet s = boundary_traces(j, mat, n);
    r.w[k] = s.w;
    r.dn[k] = s.dn;
    r.m_nn[k] = s.m_nn;
    r.m_ns[k] = s.m_ns;
    r.v_n[k] = s.v_n;
  }
  return r;
}

inline Jet column_jet(const Eigen::Matrix<double, 15, 1>& v) {
  Jet j;
  for (int i = 0; i < 15; ++i)
    j[i] = v[i];
  return j;
}

} // namespace plate::detail

#pragma once

#include <vector>

#include <Eigen/Core>

namespace plate {

/// Points and weights on the reference triangle {x, y >= 0, x + y <= 1}
/// (weights sum to 1/2) or on the unit interval [0, 1] (weights sum to 1).
struct QuadratureRule {
  std::vector<Eigen::Vector2d> points; // interval rules use points[i].x()
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Collapsed-coordinate (Duffy) product rule exact for polynomials of total degree <= degree.
/// Supported degrees: 0..12.
QuadratureRule make_triangle_rule(int degree);

/// Gauss-Legendre on [0, 1], exact up to degree; supported degrees 0..21.
QuadratureRule make_edge_rule(int degree);

} // namespace plate

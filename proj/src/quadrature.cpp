#include "plate/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "plate/errors.hpp"

namespace plate {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureRule make_triangle_rule(int degree) {
  if (degree < 0 || degree > 12)
    throw InvalidArgument("make_triangle_rule: unsupported degree " + std::to_string(degree));
  // the collapsed direction carries an extra factor (1 - u)
  const int m = (degree + 2 + 1) / 2;
  std::vector<double> x, w;
  gauss_legendre(m, x, w);
  QuadratureRule rule;
  rule.degree = degree;
  for (int i = 0; i < m; ++i) {
    const double u = 0.5 * (x[i] + 1.0);
    const double wu = 0.5 * w[i];
    for (int j = 0; j < m; ++j) {
      const double v = 0.5 * (x[j] + 1.0);
      const double wv = 0.5 * w[j];
      rule.points.emplace_back(u, v * (1.0 - u));
      rule.weights.push_back(wu * wv * (1.0 - u));
    }
  }
  return rule;
}

QuadratureRule make_edge_rule(int degree) {
  if (degree < 0 || degree > 21)
    throw InvalidArgument("make_edge_rule: unsupported degree " + std::to_string(degree));
  const int n = degree / 2 + 1;
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  QuadratureRule rule;
  rule.degree = degree;
  for (int i = 0; i < n; ++i) {
    rule.points.emplace_back(0.5 * (x[i] + 1.0), 0.0);
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

} // namespace plate

#include <cmath>

#include <gtest/gtest.h>

#include "plate/errors.hpp"
#include "plate/quadrature.hpp"

using namespace plate;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// int over the reference triangle of x^a y^b = a! b! / (a + b + 2)!
double monomial_integral(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

double integrate(const QuadratureRule& r, int a, int b) {
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q)
    s += r.weights[q] * std::pow(r.points[q].x(), a) * std::pow(r.points[q].y(), b);
  return s;
}

} // namespace

TEST(Quadrature, TriangleDegreeTwoIntegratesXPlusY) {
  const QuadratureRule r = make_triangle_rule(2);
  EXPECT_NEAR(integrate(r, 1, 0) + integrate(r, 0, 1), 1.0 / 3.0, 1e-15);
}

TEST(Quadrature, EdgeDegreeElevenIntegratesT11) {
  const QuadratureRule r = make_edge_rule(11);
  EXPECT_EQ(r.size(), 6u);
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q)
    s += r.weights[q] * std::pow(r.points[q].x(), 11);
  EXPECT_NEAR(s, 1.0 / 12.0, 1e-14);
}

TEST(Quadrature, DegreeTenTriangleX5Y5MatchesBetaFormula) {
  const QuadratureRule r = make_triangle_rule(10);
  EXPECT_NEAR(integrate(r, 5, 5), 1.0 / 33264.0, 1e-12 / 33264.0);
}

TEST(Quadrature, TriangleRulesExactUpToDeclaredDegree) {
  for (int d = 0; d <= 12; ++d) {
    const QuadratureRule r = make_triangle_rule(d);
    double wsum = 0.0;
    for (double w : r.weights)
      wsum += w;
    EXPECT_NEAR(wsum, 0.5, 1e-14) << "degree " << d;
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        const double exact = monomial_integral(a, b);
        EXPECT_NEAR(integrate(r, a, b), exact, 1e-12 * exact) << "degree " << d << " x^" << a << " y^" << b;
      }
  }
}

TEST(Quadrature, EdgeRulesExactUpToDeclaredDegree) {
  for (int d = 0; d <= 21; ++d) {
    const QuadratureRule r = make_edge_rule(d);
    for (int k = 0; k <= d; ++k) {
      double s = 0.0;
      for (std::size_t q = 0; q < r.size(); ++q)
        s += r.weights[q] * std::pow(r.points[q].x(), k);
      EXPECT_NEAR(s, 1.0 / (k + 1), 1e-13) << "degree " << d << " t^" << k;
    }
  }
}

TEST(Quadrature, UnsupportedDegreesThrow) {
  EXPECT_THROW(make_triangle_rule(13), InvalidArgument);
  EXPECT_THROW(make_triangle_rule(-1), InvalidArgument);
  EXPECT_THROW(make_edge_rule(22), InvalidArgument);
}

TEST(Quadrature, GaussLegendreSymmetric) {
  std::vector<double> x, w;
  gauss_legendre(7, x, w);
  ASSERT_EQ(x.size(), 7u);
  for (int i = 0; i < 7; ++i) {
    EXPECT_NEAR(x[i], -x[6 - i], 1e-15);
    EXPECT_NEAR(w[i], w[6 - i], 1e-15);
  }
}

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "plate/adaptive.hpp"
#include "plate/errors.hpp"

using namespace plate;

namespace {

double sum_sq(std::span<const double> v, const std::vector<int>& idx) {
  double s = 0.0;
  for (int i : idx)
    s += v[i] * v[i];
  return s;
}

ProblemSetup benchmark_setup(int n) {
  const ClampedBenchmark b = clamped_benchmark();
  ProblemSetup s{build_unit_square_mesh(n), {b.material, b.load, BoundarySpec::preset(4, "clamped"), b.exact}};
  s.variant = IndicatorVariant::ex1;
  return s;
}

ProblemSetup corner_supported_setup() {
  SegmentCondition free;
  free.eps_v = ExtReal::infinity();
  free.eps_r = ExtReal::infinity();
  ProblemSetup s{build_unit_square_mesh(2),
                 {Material::make(1.0, 0.3, 1.0), constant_load(1.0),
                  BoundarySpec::uniform(4, free, CornerCondition{ExtReal(0.0), 0.0}), std::nullopt}};
  s.variant = IndicatorVariant::ex2;
  return s;
}

} // namespace

TEST(Dorfler, FullFractionMarksEverythingNonzero) {
  const std::vector<double> e{0.5, 0.1, 0.9, 0.3};
  auto m = dorfler_mark(e, 1.0);
  std::sort(m.begin(), m.end());
  EXPECT_EQ(m, (std::vector<int>{0, 1, 2, 3}));
}

TEST(Dorfler, TinyFractionMarksLargest) {
  const std::vector<double> e{0.5, 0.1, 0.9, 0.3};
  EXPECT_EQ(dorfler_mark(e, 1e-6), std::vector<int>{2});
}

TEST(Dorfler, TiesPreferLowerIndex) {
  const std::vector<double> e{1.0, 2.0, 2.0, 2.0};
  EXPECT_EQ(dorfler_mark(e, 0.1), std::vector<int>{1});
  const auto two = dorfler_mark(e, 0.4);
  EXPECT_EQ(two, (std::vector<int>{1, 2}));
}

TEST(Dorfler, HalfFractionOfSquares) {
  // squares 1, 16, 4, 9: the 16 alone covers half of 30
  const std::vector<double> e{1.0, 4.0, 2.0, 3.0};
  EXPECT_EQ(dorfler_mark(e, 0.5), std::vector<int>{1});
  EXPECT_EQ(dorfler_mark(e, 0.6), (std::vector<int>{1, 3}));
}

TEST(Dorfler, MarkedSetIsMinimal) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> e(40);
    for (double& v : e)
      v = u(rng);
    const double theta = 0.05 + 0.9 * u(rng);
    const auto m = dorfler_mark(e, theta);
    const double total = sum_sq(e, [&] {
      std::vector<int> all(e.size());
      std::iota(all.begin(), all.end(), 0);
      return all;
    }());
    EXPECT_GE(sum_sq(e, m), theta * total * (1 - 1e-14));
    // dropping the smallest marked entry breaks the criterion, and every marked entry
    // is at least as large as every unmarked one
    auto smaller = m;
    smaller.pop_back();
    EXPECT_LT(sum_sq(e, smaller), theta * total);
    double min_marked = 1e300;
    for (int i : m)
      min_marked = std::min(min_marked, e[i]);
    for (int i = 0; i < static_cast<int>(e.size()); ++i)
      if (std::find(m.begin(), m.end(), i) == m.end())
        EXPECT_LE(e[i], min_marked);
  }
}

TEST(Dorfler, InvalidFractionRejected) {
  const std::vector<double> e{1.0, 2.0};
  EXPECT_THROW(dorfler_mark(e, 0.0), InvalidArgument);
  EXPECT_THROW(dorfler_mark(e, 1.5), InvalidArgument);
  EXPECT_THROW(dorfler_mark(e, std::nan("")), InvalidArgument);
}

TEST(Uniform, BenchmarkHistory) {
  const ConvergenceHistory h = run_uniform(benchmark_setup(2), 3);
  ASSERT_EQ(h.rows.size(), 3u);
  EXPECT_FALSE(h.theta);
  for (std::size_t k = 1; k < h.rows.size(); ++k) {
    EXPECT_LT(h.rows[k].eta, h.rows[k - 1].eta);
    EXPECT_NEAR(h.rows[k].h, h.rows[k - 1].h / 2.0, 1e-14);
    EXPECT_NEAR(static_cast<double>(h.rows[k].dofs) / h.rows[k - 1].dofs, 4.0, 1.5);
    EXPECT_EQ(h.rows[k].elements, 4 * h.rows[k - 1].elements);
    ASSERT_TRUE(h.rows[k].err);
    EXPECT_LT(*h.rows[k].err, *h.rows[k - 1].err);
  }
  EXPECT_EQ(run_uniform(benchmark_setup(2), 1).rows.size(), 1u);
}

TEST(Uniform, ObserverSeesEveryLevel) {
  int calls = 0;
  run_uniform(benchmark_setup(1), 2, [&](int iter, const Mesh& m, const LevelResult& r) {
    EXPECT_EQ(iter, calls);
    EXPECT_EQ(r.space->num_dofs(), static_cast<int>(r.solution.coefficients.size()));
    EXPECT_EQ(static_cast<int>(r.indicators.size()), m.num_triangles());
    ++calls;
  });
  EXPECT_EQ(calls, 2);
}

TEST(Adaptive, DeterministicAndGrowing) {
  const ConvergenceHistory a = run_adaptive(corner_supported_setup(), 4, 0.5);
  const ConvergenceHistory b = run_adaptive(corner_supported_setup(), 4, 0.5);
  ASSERT_EQ(a.rows.size(), 4u);
  ASSERT_TRUE(a.theta);
  EXPECT_EQ(*a.theta, 0.5);
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    EXPECT_EQ(a.rows[k].dofs, b.rows[k].dofs);
    EXPECT_EQ(a.rows[k].eta, b.rows[k].eta);
    EXPECT_FALSE(a.rows[k].err);
    if (k > 0)
      EXPECT_GT(a.rows[k].dofs, a.rows[k - 1].dofs);
  }
}

TEST(Adaptive, InvalidArgumentsRejected) {
  EXPECT_THROW(run_adaptive(corner_supported_setup(), 0, 0.5), InvalidArgument);
  EXPECT_THROW(run_adaptive(corner_supported_setup(), 2, 0.0), InvalidArgument);
  EXPECT_THROW(run_uniform(benchmark_setup(1), 0), InvalidArgument);
}

TEST(History, LogLogSlopeExact) {
  const std::vector<double> x{1, 2, 4, 8}, y{3, 3.0 / 4, 3.0 / 16, 3.0 / 64};
  EXPECT_NEAR(loglog_slope(x, y), -2.0, 1e-14);
  EXPECT_THROW(loglog_slope(std::vector<double>{1}, std::vector<double>{1}), InvalidArgument);
}

TEST(History, CsvLayout) {
  ConvergenceHistory h;
  h.gamma = 1e-3;
  h.method = "nitsche";
  h.seed = "unit-square-n2";
  h.theta = 0.5;
  IterationRecord r;
  r.dofs = 70;
  r.eta = 1.5;
  r.err = 0.25;
  h.rows.push_back(r);
  std::ostringstream out;
  h.write_csv(out);
  const std::string csv = out.str();
  EXPECT_EQ(csv.rfind("# gamma=0.001 method=nitsche seed=unit-square-n2 theta=0.5\n", 0), 0u);
  EXPECT_NE(csv.find("iter,N,h,eta,err,u_mid,seconds,eta_ek\n0,70,0,1.5,0.25,,0,0\n"), std::string::npos);
}

#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plate/argyris.hpp"
#include "plate/assembly.hpp"
#include "plate/estimator.hpp"
#include "plate/linear_solve.hpp"
#include "plate/mesh.hpp"
#include "plate/plate_model.hpp"

namespace plate {

/// Everything needed to run one solve-estimate cycle on a given mesh.
struct ProblemSetup {
  Mesh initial_mesh;
  PlateProblem problem;
  Method method = Method::nitsche;
  double gamma = 1e-3;
  IndicatorVariant variant = IndicatorVariant::ex1;
  AssemblyOptions assembly;
  EstimatorOptions estimator;
  SolveOptions solver;
  std::optional<Eigen::Vector2d> probe = Eigen::Vector2d(0.5, 0.5);
  std::string seed = "unit-square"; // describes the initial mesh in CSV headers
};

/// Result of one cycle.
struct LevelResult {
  std::shared_ptr<const ArgyrisSpace> space;
  Solution solution;
  EstimatorReport report;
  std::vector<double> indicators; // E_K
  std::optional<NormReport> error;
  double seconds = 0.0;
};

LevelResult solve_level(const ProblemSetup& setup, const Mesh& mesh);

struct IterationRecord {
  int iter = 0;
  int dofs = 0;
  int elements = 0;
  double h = 0.0;
  double eta = 0.0;    // global eta_h
  double eta_ek = 0.0; // sqrt(sum E_K^2)
  std::optional<double> err;
  std::optional<double> u_probe;
  double seconds = 0.0;
};

struct ConvergenceHistory {
  std::vector<IterationRecord> rows;
  std::optional<double> theta; // empty for uniform runs
  std::string method;
  double gamma = 0.0;
  std::string seed;

  /// Header comment, then iter,N,h,eta,err,u_mid,seconds,eta_ek.
  void write_csv(std::ostream& out) const;
};

/// Minimal set M, largest E_K first (ties: lower index), with sum_M E_K^2 >= theta sum E_K^2.
/// Throws InvalidArgument unless 0 < theta <= 1.
std::vector<int> dorfler_mark(std::span<const double> indicators, double theta);

using LevelObserver = std::function<void(int iter, const Mesh& mesh, const LevelResult& result)>;

/// Solves on the initial mesh and `levels - 1` red refinements of it.
ConvergenceHistory run_uniform(const ProblemSetup& setup, int levels, const LevelObserver& observer = {});

/// `iterations` solves; between them the Dorfler set is bisected with closure.
ConvergenceHistory run_adaptive(const ProblemSetup& setup, int iterations, double theta,
                                const LevelObserver& observer = {});

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

} // namespace plate

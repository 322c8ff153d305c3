#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "plate/argyris.hpp"
#include "plate/assembly.hpp"
#include "plate/plate_model.hpp"

namespace plate {

/// Squared L2 quantities on one boundary edge, with v = V_n(u_h) - g^v and
/// m = M_nn(u_h) - g^r. Any weighted boundary residual is a quadratic form in these.
struct BoundaryGram {
  double uu = 0, dd = 0, vv = 0, mm = 0, uv = 0, dm = 0;
};

struct CornerData {
  double value = 0;      // u_h(c_i)
  double jump_data = 0;  // [[M_ns(u_h)]](c_i) - g^c_i
};

/// Residual indicators of a discrete solution.
struct EstimatorReport {
  std::vector<double> eta_K;        // h_K^2 ||D Lap^2 u_h - f||_K
  std::vector<double> eta_V;        // per edge, h_E^{3/2} ||[[V_n]]||_E; 0 on boundary edges
  std::vector<double> eta_M;        // per edge, h_E^{1/2} ||[[M_nn]]||_E; 0 on boundary edges
  std::vector<double> jump_V;       // per edge, ||[[V_n]]||_E
  std::vector<double> jump_M;       // per edge, ||[[M_nn]]||_E
  std::vector<double> residual;     // per element, ||D Lap^2 u_h - f||_K
  std::vector<BoundaryGram> gram;   // per entry of Mesh::boundary_edges()
  std::vector<double> eta_v;        // per entry of Mesh::boundary_edges()
  std::vector<double> eta_r;
  std::vector<CornerData> corners;  // per corner
  std::vector<double> eta_c;
  double eta_h = 0.0;
  /// Efficiency of the corner terms is not guaranteed by the theory; they are computed but flagged.
  bool corner_efficiency_unproven = true;

  /// Sum of squares over all families, recomputed from the stored vectors.
  double recompute_eta_h() const;
};

struct EstimatorOptions {
  int triangle_degree = 10;
  int edge_degree = 11;
  Execution execution = Execution::parallel;
};

EstimatorReport compute_estimators(const ArgyrisSpace& space, const Eigen::VectorXd& u, const PlateProblem& problem,
                                   const EstimatorOptions& options = {});

/// Elementwise indicators used to drive adaptivity. The first four follow the
/// experiment-specific indicators; `weighted` uses the compliance-weighted boundary
/// and corner residuals for arbitrary boundary data.
enum class IndicatorVariant { ex1, ex2, ex3_nitsche, ex3_classical, weighted };

IndicatorVariant parse_variant(const std::string& name);
std::string to_string(IndicatorVariant v);

/// Whether the variant's boundary terms are defined for this boundary data.
bool indicator_fits(const BoundarySpec& spec, IndicatorVariant variant);

/// Variant matching the boundary data and method; `weighted` when none of the specific ones fits.
IndicatorVariant default_variant(const BoundarySpec& spec, Method method);

/// E_K per element. Throws InvalidArgument when the boundary spec does not fit the variant.
std::vector<double> aggregate_elementwise(const EstimatorReport& report, const Mesh& mesh, const BoundarySpec& spec,
                                          IndicatorVariant variant);

/// Components of ||u - u_h||_h^2.
struct NormReport {
  double energy = 0;   // a(e, e)
  double deflection = 0; // sum 1/(eps^v + h_E^3) ||e||_E^2
  double rotation = 0;   // sum 1/(eps^r + h_E) ||d_n e||_E^2
  double corner = 0;     // sum 1/(eps^c + h_i^2) e(c_i)^2

  double total() const;
};

NormReport mesh_norm_error(const ArgyrisSpace& space, const Eigen::VectorXd& u, const ExactSolution& exact,
                           const PlateProblem& problem, const EstimatorOptions& options = {});

/// Data oscillations: f against its P1 projection per element, boundary data against
/// their P0 projection per edge, weighted like the matching residuals.
struct Oscillations {
  std::vector<double> osc_K;
  std::vector<double> osc_v; // per entry of Mesh::boundary_edges()
  std::vector<double> osc_r;
};

Oscillations compute_oscillations(const Mesh& mesh, const PlateProblem& problem,
                                  const EstimatorOptions& options = {});

/// CSV with rows (kind, id, value) and a final eta_h summary row.
void write_estimator_csv(std::ostream& out, const EstimatorReport& report, const std::string& comment = "");

} // namespace plate

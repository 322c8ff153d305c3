#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "plate/jet.hpp"
#include "plate/mesh.hpp"

namespace plate {

/// Isotropic plate material.
struct Material {
  double young = 1.0;
  double poisson = 0.0;
  double thickness = 1.0;

  /// Validating factory: E > 0, d > 0, 0 <= nu < 1/2.
  static Material make(double young, double poisson, double thickness);

  /// D = E d^3 / (12 (1 - nu^2)).
  double rigidity() const;
};

/// Nonnegative spring compliance that may be +infinity.
class ExtReal {
public:
  ExtReal() = default;
  /// Throws InvalidArgument for negative or NaN values; +inf is accepted.
  ExtReal(double value);
  static ExtReal infinity() { return ExtReal(std::numeric_limits<double>::infinity()); }

  bool is_infinite() const { return infinite_; }
  bool is_zero() const { return !infinite_ && value_ == 0.0; }
  /// Finite value; throws for infinity.
  double value() const;

  /// 1 / (eps + a) for a > 0; exactly 0 at eps = inf.
  double inverse_weight(double a) const { return infinite_ ? 0.0 : 1.0 / (value_ + a); }
  /// eps / (eps + a) for a > 0; exactly 1 at eps = inf and 0 at eps = 0.
  double fraction_weight(double a) const { return infinite_ ? 1.0 : value_ / (value_ + a); }

  std::string to_string() const;
  bool operator==(const ExtReal&) const = default;

private:
  double value_ = 0.0;
  bool infinite_ = false;
};

/// Scalar data on the domain or on boundary segments.
///
/// `breakpoints(a, b)` returns the parameters t in (0, 1) where the function
/// jumps along the segment a + t (b - a); quadrature is split there.
struct LoadFunction {
  std::string name = "constant:0";
  std::function<double(const Eigen::Vector2d&)> value = [](const Eigen::Vector2d&) { return 0.0; };
  std::function<std::vector<double>(const Eigen::Vector2d&, const Eigen::Vector2d&)> breakpoints;
  /// Degree of the function if it is a polynomial, -1 otherwise.
  int polynomial_degree = 0;

  double operator()(const Eigen::Vector2d& x) const { return value(x); }
  bool is_zero() const { return name == "constant:0"; }
  std::vector<double> breaks(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const {
    return breakpoints ? breakpoints(a, b) : std::vector<double>{};
  }
};

LoadFunction constant_load(double v);
/// Equals `below` where the coordinate `axis` ('x' or 'y') is < threshold, `above` otherwise.
LoadFunction step_load(char axis, double threshold, double below, double above);
/// Smooth (non-polynomial) load given by a callable.
LoadFunction function_load(std::string name, std::function<double(const Eigen::Vector2d&)> f);
/// Registry: "constant:<v>", "step:<axis>:<threshold>:<below>:<above>", "clamped-benchmark".
LoadFunction parse_load(const std::string& spec);

/// Conditions on one boundary segment Gamma_i.
struct SegmentCondition {
  ExtReal eps_v; // deflection spring compliance
  ExtReal eps_r; // rotation spring compliance
  LoadFunction g_v;
  LoadFunction g_r;
};

/// Conditions at one corner c_i.
struct CornerCondition {
  ExtReal eps_c;
  double g_c = 0.0;
};

/// Segment/corner data, indexed like Mesh segments and corners.
struct BoundarySpec {
  std::vector<SegmentCondition> segments;
  std::vector<CornerCondition> corners;

  /// Uniform spec for m segments.
  static BoundarySpec uniform(int m, const SegmentCondition& segment, const CornerCondition& corner);
  /// Named conditions for m segments: "clamped", "simply-supported", "free".
  static BoundarySpec preset(int m, const std::string& name);

  /// Sizes must match the mesh and corner loads be finite. Infinite compliance with
  /// nonzero paired load is accepted (pure Neumann data). A plate with every
  /// compliance infinite has rigid-body modes and is rejected.
  void validate(const Mesh& mesh) const;
  /// Sizes and loads only; a plate without support passes. Enough for the boundary forms
  /// and the estimators, which are defined for any data.
  void check_shape(const Mesh& mesh) const;

  bool all_clamped() const;
};

/// Field with known derivatives up to order 4.
struct ExactSolution {
  JetFunction jet;
};

/// Complete plate problem.
struct PlateProblem {
  Material material;
  LoadFunction load;
  BoundarySpec boundary;
  std::optional<ExactSolution> exact;
};

// --- trace operators --------------------------------------------------------

/// Hessian of a jet.
Eigen::Matrix2d hessian(const Jet& j);

/// M = E d^3/(12(1+nu)) (K + nu/(1-nu) tr(K) I) with K = -Hessian.
Eigen::Matrix2d moment_tensor(const Eigen::Matrix2d& hessian, const Material& material);

/// Tangent paired with an outward normal: counterclockwise rotation (-n2, n1).
inline Eigen::Vector2d tangent(const Eigen::Vector2d& n) { return {-n.y(), n.x()}; }

/// Boundary/edge traces of a field at one point for a given unit normal.
struct TraceSet {
  double w = 0.0;
  double dn = 0.0;   // dw/dn
  double m_nn = 0.0;
  double m_ns = 0.0;
  double q_n = 0.0;  // (Div M) . n
  double v_n = 0.0;  // Kirchhoff shear Q_n + dM_ns/ds
};

/// Traces from derivatives up to order 3; dM_ns/ds is taken analytically from the third derivatives.
TraceSet boundary_traces(const Jet& j, const Material& material, const Eigen::Vector2d& n);

/// Bilaplacian from fourth derivatives.
inline double bilaplacian(const Jet& j) {
  return j[jet_index(4, 0)] + 2.0 * j[jet_index(2, 2)] + j[jet_index(0, 4)];
}

/// [[M_ns]] at a corner: M_ns from the leaving segment minus M_ns from the arriving one.
double corner_twist_jump(const Jet& leaving, const Eigen::Vector2d& n_leaving, const Jet& arriving,
                         const Eigen::Vector2d& n_arriving, const Material& material);

// --- benchmark --------------------------------------------------------------

struct ClampedBenchmark {
  Material material;
  ExactSolution exact;
  LoadFunction load;
};

/// u = sin^2(pi x) sin^2(pi y) on the unit square, E = 1, nu = 0.3, d = 1.
ClampedBenchmark clamped_benchmark();

/// Jet of sin^2(pi x) sin^2(pi y).
Jet clamped_benchmark_jet(const Eigen::Vector2d& x);

/// Boundary data that make `exact` satisfy the Robin and corner conditions for
/// the given compliances (loads derived from the traces of `exact`).
BoundarySpec manufactured_boundary(const Mesh& mesh, const ExactSolution& exact, const Material& material,
                                   const std::vector<ExtReal>& eps_v, const std::vector<ExtReal>& eps_r,
                                   const std::vector<ExtReal>& eps_c);

} // namespace plate

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "plate/argyris.hpp"
#include "plate/parallel.hpp"
#include "plate/plate_model.hpp"

namespace plate {

struct AssemblyOptions {
  int triangle_degree = 10;
  int edge_degree = 11;
  Execution execution = Execution::parallel;
};

/// DOFs fixed by the classical clamped elimination.
struct Elimination {
  std::vector<int> free;
  std::vector<int> fixed;
  std::vector<double> values; // same length as fixed
};

/// Finalized symmetric system.
struct SparseSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  std::optional<Elimination> elimination;
  double gamma = 0.0;

  int size() const { return static_cast<int>(rhs.size()); }
};

/// Unfinalized contributions: triplets (duplicates summed on finalize) and a load vector.
struct PartialSystem {
  int n = 0;
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs;

  explicit PartialSystem(int size = 0) : n(size), rhs(Eigen::VectorXd::Zero(size)) {}
  PartialSystem& operator+=(const PartialSystem& other);
  SparseSystem finalize(double gamma = 0.0) const;
};

enum class Method { nitsche, classical_weak, classical_eliminate };

Method parse_method(const std::string& name);
std::string to_string(Method m);

/// a(w, v) = int M(w) : K(v) and l(v) = int f v.
PartialSystem assemble_interior(const ArgyrisSpace& space, const Material& material, const LoadFunction& f,
                                const AssemblyOptions& options = {});

/// Nitsche boundary forms b_h, c_h, d_h and loads f_h, g_h, l_h.
/// Throws InvalidArgument for gamma <= 0.
PartialSystem assemble_nitsche_boundary(const ArgyrisSpace& space, const Material& material,
                                        const BoundarySpec& spec, double gamma,
                                        const AssemblyOptions& options = {});

SparseSystem assemble_nitsche(const ArgyrisSpace& space, const PlateProblem& problem, double gamma,
                              const AssemblyOptions& options = {});

enum class ClassicalMode { weak_robin, eliminate_clamped };

/// Weak Robin form (eps = 0 rejected with UnsupportedConfiguration, eps = inf drops the term)
/// or clamped DOF elimination on an axis-parallel rectangle.
SparseSystem assemble_classical(const ArgyrisSpace& space, const PlateProblem& problem, ClassicalMode mode,
                                const AssemblyOptions& options = {});

SparseSystem assemble(const ArgyrisSpace& space, const PlateProblem& problem, Method method, double gamma,
                      const AssemblyOptions& options = {});

/// Constrained DOFs of a clamped axis-parallel rectangle: value and gradient at boundary
/// vertices, the second derivatives that vanish along the edge, all second derivatives
/// at corners, and boundary edge normal derivatives.
std::vector<int> clamped_dofs(const ArgyrisSpace& space);

} // namespace plate

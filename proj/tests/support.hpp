#pragma once

// Oracles and fixtures shared by the unit tests and the acceptance binary.
// Everything here is computed independently of the assembly and estimator
// kernels: polynomials are differentiated term by term, boundary forms are
// integrated with plain Gauss-Legendre on each edge.

#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "plate/argyris.hpp"
#include "plate/assembly.hpp"
#include "plate/mesh.hpp"
#include "plate/plate_model.hpp"

namespace plate::testing {

/// Bivariate polynomial sum c x^a y^b.
struct Polynomial {
  struct Term {
    int a, b;
    double c;
  };
  std::vector<Term> terms;

  double operator()(const Eigen::Vector2d& p) const { return jet(p)[0]; }
  Jet jet(const Eigen::Vector2d& p) const;
  JetFunction as_jet_function() const;
  int degree() const;
};

Polynomial random_polynomial(int degree, std::mt19937& rng);

/// A fixed quintic used for the consistency runs.
Polynomial manufactured_quintic();

/// D * bilaplacian of a polynomial, as a load.
LoadFunction bilaplacian_load(const Polynomial& p, const Material& material);

Eigen::VectorXd random_vector(int n, std::mt19937& rng);

/// Nitsche boundary bilinear form w^T B_boundary v, integrated edge by edge.
double nitsche_boundary_oracle(const ArgyrisSpace& space, const Material& material, const BoundarySpec& spec,
                               double gamma, const Eigen::VectorXd& w, const Eigen::VectorXd& v);

/// Boundary part of the classical weak Robin form: 1/eps weighted traces, infinite eps dropped.
double classical_boundary_oracle(const ArgyrisSpace& space, const BoundarySpec& spec, const Eigen::VectorXd& w,
                                 const Eigen::VectorXd& v);

/// a(w, v) by dense quadrature of the energy density on every element.
double energy_oracle(const ArgyrisSpace& space, const Material& material, const Eigen::VectorXd& w,
                     const Eigen::VectorXd& v);

double symmetry_error(const Eigen::SparseMatrix<double>& a);
/// The matrix that is actually factorized: the free-DOF block when DOFs are eliminated.
Eigen::SparseMatrix<double> solved_matrix(const SparseSystem& sys);
double min_eigenvalue(const Eigen::SparseMatrix<double>& a);

/// Boundary-condition fixtures of the three experiments.
struct NamedProblem {
  std::string name;
  PlateProblem problem;
  std::vector<Method> methods;
};
std::vector<NamedProblem> experiment_problems();

// --- kernel checks, each returns the worst observed deviation -------------

/// max |D(psi) - I| over the reference DOF functionals applied to the basis.
double duality_error();
/// Interpolation of random quintics on a perturbed mesh: worst error at random points over
/// derivatives up to `max_order`, relative to max(1, |exact|). Order 0 is the max-norm check.
double p5_reproduction_error(std::mt19937& rng, int max_order = 0);
/// Value and gradient mismatch across interior edges for a random coefficient vector,
/// relative to the coefficient max norm.
double c1_continuity_error(std::mt19937& rng);
/// Trace operators against central finite differences of M, worst relative error.
double trace_fd_error(std::mt19937& rng);

/// Consistency run: max |u_h - I u| / max |I u| for the manufactured quintic with data
/// derived from the given compliances.
double consistency_error(Method method, const std::vector<ExtReal>& eps_v, const std::vector<ExtReal>& eps_r,
                         const std::vector<ExtReal>& eps_c, int n = 2, double gamma = 1e-3);

/// A mesh of the unit square with jittered interior vertices.
Mesh perturbed_square(int n, double jitter, std::mt19937& rng);

} // namespace plate::testing

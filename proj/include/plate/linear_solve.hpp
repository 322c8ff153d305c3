#pragma once

#include <Eigen/Core>

#include "plate/assembly.hpp"

namespace plate {

enum class SolverKind { direct, conjugate_gradient };

struct SolveOptions {
  SolverKind kind = SolverKind::direct;
  double tolerance = 1e-9;     // required relative residual
  int refinement_steps = 3;    // iterative refinement sweeps for the direct solver
  int max_iterations = 100000; // conjugate gradient
};

struct Solution {
  Eigen::VectorXd coefficients; // full DOF vector, eliminated values inserted
  double min_pivot = 0.0;       // smallest D entry of the scaled LDL^T factor (direct only)
  long fill = 0;                // nonzeros of L (direct only)
  double residual = 0.0;        // ||B x - L|| / ||L|| on the solved (reduced) system
  int iterations = 0;           // CG iterations or refinement sweeps
};

/// Solves a symmetric positive definite system. Throws NotPositiveDefinite when the
/// factorization meets a non-positive pivot and SolverFailure when the residual target
/// is missed.
Solution solve_spd(const SparseSystem& system, const SolveOptions& options = {});

} // namespace plate

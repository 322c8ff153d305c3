#include "plate/linear_solve.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "plate/errors.hpp"

namespace plate {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Restricts B x = L to the free DOFs: B_ff x_f = L_f - B_fc x_c.
void reduce(const SparseSystem& sys, SpMat& a, Eigen::VectorXd& b) {
  const Elimination& el = *sys.elimination;
  const int n = sys.size();
  std::vector<int> pos(n, -1);
  for (std::size_t i = 0; i < el.free.size(); ++i)
    pos[el.free[i]] = static_cast<int>(i);
  Eigen::VectorXd xc = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < el.fixed.size(); ++i)
    xc[el.fixed[i]] = el.values[i];
  const Eigen::VectorXd lifted = sys.rhs - sys.matrix * xc;

  const int nf = static_cast<int>(el.free.size());
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < sys.matrix.outerSize(); ++k)
    for (SpMat::InnerIterator it(sys.matrix, k); it; ++it)
      if (pos[it.row()] >= 0 && pos[it.col()] >= 0)
        trip.emplace_back(pos[it.row()], pos[it.col()], it.value());
  a.resize(nf, nf);
  a.setFromTriplets(trip.begin(), trip.end());
  b.resize(nf);
  for (int i = 0; i < nf; ++i)
    b[i] = lifted[el.free[i]];
}

double relative_residual(const SpMat& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double nb = b.norm();
  const double nr = (a * x - b).norm();
  return nb > 0.0 ? nr / nb : nr;
}

} // namespace

Solution solve_spd(const SparseSystem& system, const SolveOptions& options) {
  SpMat a;
  Eigen::VectorXd b;
  if (system.elimination) {
    reduce(system, a, b);
  } else {
    a = system.matrix;
    b = system.rhs;
  }
  const int n = static_cast<int>(b.size());
  Solution sol;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);

  // the factorization runs even for a zero right-hand side so that indefinite systems are reported
  if (n > 0) {
    // symmetric Jacobi scaling S A S, S = diag(1/sqrt(a_ii))
    Eigen::VectorXd s(n);
    const Eigen::VectorXd diag = a.diagonal();
    for (int i = 0; i < n; ++i) {
      if (!(diag[i] > 0.0)) {
        std::ostringstream msg;
        msg << "non-positive diagonal entry " << diag[i] << " at DOF " << i
            << "; the Nitsche form is not coercive, try a smaller gamma";
        throw NotPositiveDefinite(msg.str());
      }
      s[i] = 1.0 / std::sqrt(diag[i]);
    }
    const SpMat as = s.asDiagonal() * a * s.asDiagonal();
    const Eigen::VectorXd bs = s.cwiseProduct(b);

    if (options.kind == SolverKind::direct) {
      Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(as);
      if (ldlt.info() != Eigen::Success)
        throw NotPositiveDefinite("sparse LDL^T factorization failed");
      sol.min_pivot = ldlt.vectorD().minCoeff();
      sol.fill = static_cast<long>(ldlt.matrixL().nestedExpression().nonZeros());
      if (!(sol.min_pivot > 0.0)) {
        std::ostringstream msg;
        msg << "non-positive pivot " << sol.min_pivot
            << " in LDL^T; the Nitsche form is not coercive, try a smaller gamma";
        throw NotPositiveDefinite(msg.str());
      }
      Eigen::VectorXd y = bs.norm() > 0.0 ? Eigen::VectorXd(ldlt.solve(bs)) : Eigen::VectorXd::Zero(n);
      for (int k = 0; k < options.refinement_steps; ++k) {
        if (relative_residual(as, y, bs) < 1e-14)
          break;
        y += ldlt.solve(bs - as * y);
        ++sol.iterations;
      }
      x = s.cwiseProduct(y);
    } else {
      Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
      cg.setTolerance(options.tolerance * 1e-2);
      cg.setMaxIterations(options.max_iterations);
      cg.compute(as);
      const Eigen::VectorXd y = cg.solve(bs);
      sol.iterations = static_cast<int>(cg.iterations());
      x = s.cwiseProduct(y);
    }
    sol.residual = relative_residual(a, x, b);
    if (!std::isfinite(sol.residual) || sol.residual > options.tolerance) {
      std::ostringstream msg;
      msg << "relative residual " << sol.residual << " exceeds " << options.tolerance;
      throw SolverFailure(msg.str());
    }
  }

  if (system.elimination) {
    const Elimination& el = *system.elimination;
    sol.coefficients = Eigen::VectorXd::Zero(system.size());
    for (std::size_t i = 0; i < el.free.size(); ++i)
      sol.coefficients[el.free[i]] = x[i];
    for (std::size_t i = 0; i < el.fixed.size(); ++i)
      sol.coefficients[el.fixed[i]] = el.values[i];
  } else {
    sol.coefficients = x;
  }
  return sol;
}

} // namespace plate

#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "plate/jet.hpp"
#include "plate/mesh.hpp"

namespace plate {

constexpr int kArgyrisDofs = 21;

using Matrix21 = Eigen::Matrix<double, kArgyrisDofs, kArgyrisDofs>;
using Vector21 = Eigen::Matrix<double, kArgyrisDofs, 1>;
/// Column k holds the jet (15 derivative slots) of shape function k.
using BasisTable = Eigen::Matrix<double, 15, kArgyrisDofs>;
/// Linear map taking a jet in reference coordinates to a jet in physical coordinates.
using JetTransform = Eigen::Matrix<double, 15, 15>;

/// The quintic Argyris element on the reference triangle (0,0), (1,0), (0,1).
///
/// DOF order: for vertex k = 0, 1, 2 the six functionals
/// u, u_x, u_y, u_xx, u_xy, u_yy at slots 6k .. 6k+5; then the outward normal
/// derivative at the midpoint of edge j (vertex j -> vertex j+1) at slot 18 + j.
/// Shape functions are obtained once by inverting the DOF matrix of the monomials.
class ArgyrisReferenceBasis {
public:
  static const ArgyrisReferenceBasis& instance();

  /// Row k: coefficients of shape function k in the monomial basis of monomials().
  const Matrix21& coefficients() const { return coefficients_; }
  /// Exponents (i, j) of x^i y^j, ordered by total degree.
  static const std::array<std::array<int, 2>, kArgyrisDofs>& monomials();

  /// Derivatives up to `order` of the 21 monomials at p; rows above `order` are zero.
  static BasisTable monomial_table(const Eigen::Vector2d& p, int order);

  /// Derivatives up to `order` (<= 4) of the 21 shape functions; throws UnsupportedOrder.
  BasisTable eval(const Eigen::Vector2d& ref, int order) const;

  static const std::array<Eigen::Vector2d, 3>& vertices();
  /// Outward unit normal of reference edge j.
  static Eigen::Vector2d edge_normal(int j);

  /// Applies the 21 reference DOF functionals to the columns produced by `table_at(point)`.
  template <class TableAt>
  static Matrix21 apply_dofs(TableAt&& table_at) {
    Matrix21 d;
    for (int k = 0; k < 3; ++k) {
      const BasisTable t = table_at(vertices()[k]);
      for (int c = 0; c < 6; ++c)
        d.row(6 * k + c) = t.row(c);
    }
    for (int j = 0; j < 3; ++j) {
      const Eigen::Vector2d mid = 0.5 * (vertices()[j] + vertices()[(j + 1) % 3]);
      const Eigen::Vector2d n = edge_normal(j);
      const BasisTable t = table_at(mid);
      d.row(18 + j) = n.x() * t.row(1) + n.y() * t.row(2);
    }
    return d;
  }

private:
  ArgyrisReferenceBasis();
  Matrix21 coefficients_;
};

/// Affine map x = origin + jacobian * xi of one triangle.
struct ElementGeometry {
  Eigen::Vector2d origin;
  Eigen::Matrix2d jacobian;
  Eigen::Matrix2d inverse;
  double det = 0.0;
  JetTransform push_forward; // reference jet -> physical jet
};

/// Pushes reference-coordinate derivatives through an affine map with inverse Jacobian g.
JetTransform make_jet_transform(const Eigen::Matrix2d& g);

/// Global C1 Argyris space on a conforming mesh.
///
/// Global DOFs: 6 per vertex (u, u_x, u_y, u_xx, u_xy, u_yy) at 6v .. 6v+5, then one
/// normal derivative per edge at 6 nV + e, taken along Mesh::global_normal(e).
/// Local edge DOFs use the element's outward normal; signs(t) holds -1 where it
/// is opposite to the global normal.
class ArgyrisSpace {
public:
  explicit ArgyrisSpace(std::shared_ptr<const Mesh> mesh);
  explicit ArgyrisSpace(Mesh mesh) : ArgyrisSpace(std::make_shared<const Mesh>(std::move(mesh))) {}

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }

  int num_dofs() const { return num_dofs_; }
  int vertex_dof(int v, int component) const { return 6 * v + component; }
  int edge_dof(int e) const { return 6 * mesh_->num_vertices() + e; }

  const std::array<int, kArgyrisDofs>& dofs(int t) const { return dofs_[t]; }
  const std::array<double, kArgyrisDofs>& signs(int t) const { return signs_[t]; }
  /// C with phi_k = sum_j C(k, j) (psi_j o F^{-1}).
  const Matrix21& transformation(int t) const { return transforms_[t]; }
  const ElementGeometry& geometry(int t) const { return geometry_[t]; }

  Eigen::Vector2d to_physical(int t, const Eigen::Vector2d& ref) const;
  Eigen::Vector2d to_reference(int t, const Eigen::Vector2d& x) const;

  /// Physical derivatives up to `order` of the 21 local shape functions (local orientation).
  BasisTable eval_basis(int t, const Eigen::Vector2d& ref, int order) const;

  /// Local coefficients of a global vector, orientation signs applied.
  Vector21 local_coefficients(int t, std::span<const double> global) const;

  Jet eval_function(int t, const Eigen::Vector2d& ref, int order, std::span<const double> global) const;

  /// Index of a triangle containing x (closed), or -1.
  int locate(const Eigen::Vector2d& x, double tol = 1e-10) const;

  /// Evaluates a global function at a physical point; throws InvalidArgument outside the mesh.
  Jet evaluate(std::span<const double> global, const Eigen::Vector2d& x, int order) const;

  /// DOF interpolant of a field given by its jet (order >= 2 required).
  Eigen::VectorXd interpolate(const JetFunction& field) const;

private:
  std::shared_ptr<const Mesh> mesh_;
  int num_dofs_ = 0;
  std::vector<std::array<int, kArgyrisDofs>> dofs_;
  std::vector<std::array<double, kArgyrisDofs>> signs_;
  std::vector<Matrix21> transforms_;
  std::vector<ElementGeometry> geometry_;
};

} // namespace plate

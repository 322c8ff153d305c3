#include "plate/argyris.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "plate/errors.hpp"

namespace plate {

namespace {

double falling(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i)
    r *= n - i;
  return r;
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i)
    r *= x;
  return r;
}

} // namespace

const std::array<std::array<int, 2>, kArgyrisDofs>& ArgyrisReferenceBasis::monomials() {
  static const auto table = [] {
    std::array<std::array<int, 2>, kArgyrisDofs> m{};
    int k = 0;
    for (int d = 0; d <= 5; ++d)
      for (int j = 0; j <= d; ++j)
        m[k++] = {d - j, j};
    return m;
  }();
  return table;
}

const std::array<Eigen::Vector2d, 3>& ArgyrisReferenceBasis::vertices() {
  static const std::array<Eigen::Vector2d, 3> v{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0),
                                                 Eigen::Vector2d(0, 1)};
  return v;
}

Eigen::Vector2d ArgyrisReferenceBasis::edge_normal(int j) {
  const Eigen::Vector2d d = vertices()[(j + 1) % 3] - vertices()[j];
  return Eigen::Vector2d(d.y(), -d.x()).normalized();
}

BasisTable ArgyrisReferenceBasis::monomial_table(const Eigen::Vector2d& p, int order) {
  BasisTable t = BasisTable::Zero();
  const auto& mono = monomials();
  for (int k = 0; k <= order; ++k) {
    for (int q = 0; q <= k; ++q) {
      const int px = k - q;
      const int row = jet_index(px, q);
      for (int m = 0; m < kArgyrisDofs; ++m) {
        const int i = mono[m][0], j = mono[m][1];
        if (px > i || q > j)
          continue;
        t(row, m) = falling(i, px) * falling(j, q) * ipow(p.x(), i - px) * ipow(p.y(), j - q);
      }
    }
  }
  return t;
}

namespace {

// Fourth derivatives of the basis amplify inversion roundoff by h^-4; inverting in
// long double keeps them within a few ulps of the double result.
Matrix21 inverse_extended(const Matrix21& a) {
  using MatrixL = Eigen::Matrix<long double, kArgyrisDofs, kArgyrisDofs>;
  const MatrixL al = a.cast<long double>();
  return Eigen::FullPivLU<MatrixL>(al).inverse().cast<double>();
}

} // namespace

ArgyrisReferenceBasis::ArgyrisReferenceBasis() {
  const Matrix21 d = apply_dofs([](const Eigen::Vector2d& p) { return monomial_table(p, 2); });
  // shape function k has coefficient row k: D * coefficients^T = I
  coefficients_ = inverse_extended(d).transpose();
}

const ArgyrisReferenceBasis& ArgyrisReferenceBasis::instance() {
  static const ArgyrisReferenceBasis basis;
  return basis;
}

BasisTable ArgyrisReferenceBasis::eval(const Eigen::Vector2d& ref, int order) const {
  if (order < 0 || order > kMaxDerivativeOrder)
    throw UnsupportedOrder("Argyris basis: derivative order " + std::to_string(order) + " not supported");
  return monomial_table(ref, order) * coefficients_.transpose();
}

JetTransform make_jet_transform(const Eigen::Matrix2d& g) {
  // d/dx = g(0,0) d/dxi + g(1,0) d/deta,  d/dy = g(0,1) d/dxi + g(1,1) d/deta
  JetTransform t = JetTransform::Zero();
  for (int k = 0; k <= kMaxDerivativeOrder; ++k) {
    for (int q = 0; q <= k; ++q) {
      const int p = k - q;
      // coefficients of the operator polynomial, indexed by the power of d/deta
      std::array<double, 5> poly{1.0, 0, 0, 0, 0};
      int deg = 0;
      auto multiply = [&](double a, double b) {
        std::array<double, 5> next{};
        for (int r = 0; r <= deg; ++r) {
          next[r] += a * poly[r];
          next[r + 1] += b * poly[r];
        }
        poly = next;
        ++deg;
      };
      for (int i = 0; i < p; ++i)
        multiply(g(0, 0), g(1, 0));
      for (int i = 0; i < q; ++i)
        multiply(g(0, 1), g(1, 1));
      for (int r = 0; r <= k; ++r)
        t(jet_index(p, q), jet_index(k - r, r)) = poly[r];
    }
  }
  return t;
}

ArgyrisSpace::ArgyrisSpace(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  const Mesh& m = *mesh_;
  const int nv = m.num_vertices();
  num_dofs_ = 6 * nv + m.num_edges();
  const int nt = m.num_triangles();
  dofs_.resize(nt);
  signs_.resize(nt);
  transforms_.resize(nt);
  geometry_.resize(nt);

  const auto& ref = ArgyrisReferenceBasis::instance();
  for (int t = 0; t < nt; ++t) {
    const auto& tri = m.triangle(t);
    const auto& te = m.triangle_edges(t);
    for (int k = 0; k < 3; ++k)
      for (int c = 0; c < 6; ++c) {
        dofs_[t][6 * k + c] = vertex_dof(tri[k], c);
        signs_[t][6 * k + c] = 1.0;
      }
    for (int j = 0; j < 3; ++j) {
      dofs_[t][18 + j] = edge_dof(te[j]);
      // outward normal of local edge j coincides with the global one iff v_j < v_{j+1}
      signs_[t][18 + j] = tri[j] < tri[(j + 1) % 3] ? 1.0 : -1.0;
    }

    ElementGeometry& geo = geometry_[t];
    const Point2& p0 = m.vertex(tri[0]);
    const Point2& p1 = m.vertex(tri[1]);
    const Point2& p2 = m.vertex(tri[2]);
    geo.origin = p0;
    geo.jacobian.col(0) = p1 - p0;
    geo.jacobian.col(1) = p2 - p0;
    geo.det = geo.jacobian.determinant();
    const double scale = geo.jacobian.squaredNorm();
    if (!(geo.det > 1e-14 * scale) || !std::isfinite(geo.det))
      throw SingularTransformation("Argyris space: degenerate triangle " + std::to_string(t));
    geo.inverse = geo.jacobian.inverse();
    geo.push_forward = make_jet_transform(geo.inverse);

    // A(i, k): physical DOF functional i applied to the pushed-forward reference shape function k
    Matrix21 a;
    for (int k = 0; k < 3; ++k) {
      const BasisTable tab = geo.push_forward * ref.eval(ArgyrisReferenceBasis::vertices()[k], 2);
      for (int c = 0; c < 6; ++c)
        a.row(6 * k + c) = tab.row(c);
    }
    for (int j = 0; j < 3; ++j) {
      const Eigen::Vector2d mid = 0.5 * (ArgyrisReferenceBasis::vertices()[j] +
                                         ArgyrisReferenceBasis::vertices()[(j + 1) % 3]);
      const Point2 d = m.vertex(tri[(j + 1) % 3]) - m.vertex(tri[j]);
      const Point2 n = Point2(d.y(), -d.x()).normalized();
      const BasisTable tab = geo.push_forward * ref.eval(mid, 1);
      a.row(18 + j) = n.x() * tab.row(1) + n.y() * tab.row(2);
    }
    if (!Eigen::FullPivLU<Matrix21>(a).isInvertible())
      throw SingularTransformation("Argyris space: singular DOF transformation on triangle " +
                                   std::to_string(t));
    transforms_[t] = inverse_extended(a).transpose();
  }
}

Eigen::Vector2d ArgyrisSpace::to_physical(int t, const Eigen::Vector2d& ref) const {
  const auto& g = geometry_[t];
  return g.origin + g.jacobian * ref;
}

Eigen::Vector2d ArgyrisSpace::to_reference(int t, const Eigen::Vector2d& x) const {
  const auto& g = geometry_[t];
  return g.inverse * (x - g.origin);
}

BasisTable ArgyrisSpace::eval_basis(int t, const Eigen::Vector2d& ref, int order) const {
  const BasisTable r = ArgyrisReferenceBasis::instance().eval(ref, order);
  return geometry_[t].push_forward * r * transforms_[t].transpose();
}

Vector21 ArgyrisSpace::local_coefficients(int t, std::span<const double> global) const {
  Vector21 c;
  for (int k = 0; k < kArgyrisDofs; ++k)
    c[k] = signs_[t][k] * global[dofs_[t][k]];
  return c;
}

Jet ArgyrisSpace::eval_function(int t, const Eigen::Vector2d& ref, int order,
                                std::span<const double> global) const {
  const Eigen::Matrix<double, 15, 1> v = eval_basis(t, ref, order) * local_coefficients(t, global);
  Jet j;
  for (int i = 0; i < 15; ++i)
    j[i] = v[i];
  return j;
}

int ArgyrisSpace::locate(const Eigen::Vector2d& x, double tol) const {
  for (int t = 0; t < mesh_->num_triangles(); ++t) {
    const Eigen::Vector2d r = to_reference(t, x);
    if (r.x() >= -tol && r.y() >= -tol && r.x() + r.y() <= 1.0 + tol)
      return t;
  }
  return -1;
}

Jet ArgyrisSpace::evaluate(std::span<const double> global, const Eigen::Vector2d& x, int order) const {
  const int t = locate(x);
  if (t < 0)
    throw InvalidArgument("evaluate: point outside the mesh");
  return eval_function(t, to_reference(t, x), order, global);
}

Eigen::VectorXd ArgyrisSpace::interpolate(const JetFunction& field) const {
  const Mesh& m = *mesh_;
  Eigen::VectorXd u(num_dofs_);
  for (int v = 0; v < m.num_vertices(); ++v) {
    const Jet j = field(m.vertex(v));
    for (int c = 0; c < 6; ++c)
      u[vertex_dof(v, c)] = j[c];
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& ed = m.edge(e);
    const Jet j = field(0.5 * (m.vertex(ed.v[0]) + m.vertex(ed.v[1])));
    const Point2 n = m.global_normal(e);
    u[edge_dof(e)] = n.x() * j[1] + n.y() * j[2];
  }
  return u;
}

} // namespace plate

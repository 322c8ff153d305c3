#include "support.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "plate/linear_solve.hpp"
#include "plate/quadrature.hpp"

namespace plate::testing {

namespace {

double falling(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i)
    r *= n - i;
  return r;
}

struct EdgeSample {
  Eigen::Vector2d x;
  double weight;
};

std::vector<EdgeSample> gauss_on(const Eigen::Vector2d& a, const Eigen::Vector2d& b, int points) {
  std::vector<double> nodes, weights;
  gauss_legendre(points, nodes, weights);
  const double len = (b - a).norm();
  std::vector<EdgeSample> out;
  for (std::size_t q = 0; q < nodes.size(); ++q)
    out.push_back({a + 0.5 * (nodes[q] + 1.0) * (b - a), 0.5 * weights[q] * len});
  return out;
}

Jet jet_in(const ArgyrisSpace& space, int t, const Eigen::Vector2d& x, const Eigen::VectorXd& u, int order) {
  return space.eval_function(t, space.to_reference(t, x), order, std::span<const double>(u.data(), u.size()));
}

} // namespace

Jet Polynomial::jet(const Eigen::Vector2d& p) const {
  Jet j{};
  for (int k = 0; k <= kMaxDerivativeOrder; ++k)
    for (int dy = 0; dy <= k; ++dy) {
      const int dx = k - dy;
      double s = 0.0;
      for (const Term& t : terms) {
        if (t.a < dx || t.b < dy)
          continue;
        s += t.c * falling(t.a, dx) * falling(t.b, dy) * std::pow(p.x(), t.a - dx) * std::pow(p.y(), t.b - dy);
      }
      j[jet_index(dx, dy)] = s;
    }
  return j;
}

JetFunction Polynomial::as_jet_function() const {
  const Polynomial copy = *this;
  return [copy](const Eigen::Vector2d& x) { return copy.jet(x); };
}

int Polynomial::degree() const {
  int d = 0;
  for (const Term& t : terms)
    d = std::max(d, t.a + t.b);
  return d;
}

Polynomial random_polynomial(int degree, std::mt19937& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Polynomial p;
  for (int k = 0; k <= degree; ++k)
    for (int b = 0; b <= k; ++b)
      p.terms.push_back({k - b, b, coef(rng)});
  return p;
}

Polynomial manufactured_quintic() {
  return {{{2, 2, 1.0}, {5, 0, 0.3}, {1, 4, -0.2}, {3, 1, 0.5}, {0, 3, -0.7}, {1, 1, 0.25}, {0, 0, 0.1}}};
}

LoadFunction bilaplacian_load(const Polynomial& p, const Material& material) {
  const double d = material.rigidity();
  LoadFunction f = function_load("bilaplacian", [p, d](const Eigen::Vector2d& x) { return d * bilaplacian(p.jet(x)); });
  f.polynomial_degree = std::max(0, p.degree() - 4);
  return f;
}

Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v[i] = u(rng);
  return v;
}

double nitsche_boundary_oracle(const ArgyrisSpace& space, const Material& material, const BoundarySpec& spec,
                               double gamma, const Eigen::VectorXd& w, const Eigen::VectorXd& v) {
  const Mesh& mesh = space.mesh();
  double total = 0.0;
  for (int e : mesh.boundary_edges()) {
    const Edge& ed = mesh.edge(e);
    const int t = ed.tri[0];
    const SegmentCondition& seg = spec.segments[ed.segment - 1];
    const Eigen::Vector2d n = mesh.outward_normal(e);
    const double h = mesh.edge_length(e);
    const double a3 = gamma * h * h * h, a1 = gamma * h;
    const double iv = seg.eps_v.inverse_weight(a3), fv = seg.eps_v.fraction_weight(a3);
    const double ir = seg.eps_r.inverse_weight(a1), fr = seg.eps_r.fraction_weight(a1);
    for (const EdgeSample& s : gauss_on(mesh.vertex(ed.v[0]), mesh.vertex(ed.v[1]), 10)) {
      const TraceSet tw = boundary_traces(jet_in(space, t, s.x, w, 3), material, n);
      const TraceSet tv = boundary_traces(jet_in(space, t, s.x, v, 3), material, n);
      const double b = iv * tw.w * tv.w - a3 * iv * (tw.v_n * tv.w + tw.w * tv.v_n) - a3 * fv * tw.v_n * tv.v_n;
      const double c =
          a1 * ir * (tw.m_nn * tv.dn + tw.dn * tv.m_nn) - a1 * fr * tw.m_nn * tv.m_nn + ir * tw.dn * tv.dn;
      total += s.weight * (b + c);
    }
  }
  for (int i = 0; i < mesh.num_segments(); ++i) {
    const auto [e_leave, e_arrive] = mesh.corner_edges(i);
    const int t0 = mesh.edge(e_leave).tri[0], t1 = mesh.edge(e_arrive).tri[0];
    const Eigen::Vector2d c = mesh.vertex(mesh.corners()[i]);
    const Eigen::Vector2d n0 = mesh.outward_normal(e_leave), n1 = mesh.outward_normal(e_arrive);
    auto jump = [&](const Eigen::VectorXd& u) {
      return corner_twist_jump(jet_in(space, t0, c, u, 2), n0, jet_in(space, t1, c, u, 2), n1, material);
    };
    const double jw = jump(w), jv = jump(v);
    const double wc = jet_in(space, t0, c, w, 0)[0], vc = jet_in(space, t0, c, v, 0)[0];
    const double h = mesh.corner_size(i);
    const double a2 = gamma * h * h;
    const ExtReal& eps = spec.corners[i].eps_c;
    const double ic = eps.inverse_weight(a2), fc = eps.fraction_weight(a2);
    total += -a2 * ic * (jw * vc + wc * jv) - a2 * fc * jw * jv + ic * wc * vc;
  }
  return total;
}

double classical_boundary_oracle(const ArgyrisSpace& space, const BoundarySpec& spec, const Eigen::VectorXd& w,
                                 const Eigen::VectorXd& v) {
  const Mesh& mesh = space.mesh();
  double total = 0.0;
  for (int e : mesh.boundary_edges()) {
    const Edge& ed = mesh.edge(e);
    const int t = ed.tri[0];
    const SegmentCondition& seg = spec.segments[ed.segment - 1];
    const Eigen::Vector2d n = mesh.outward_normal(e);
    const double kv = seg.eps_v.is_infinite() ? 0.0 : 1.0 / seg.eps_v.value();
    const double kr = seg.eps_r.is_infinite() ? 0.0 : 1.0 / seg.eps_r.value();
    for (const EdgeSample& s : gauss_on(mesh.vertex(ed.v[0]), mesh.vertex(ed.v[1]), 10)) {
      const Jet jw = jet_in(space, t, s.x, w, 1), jv = jet_in(space, t, s.x, v, 1);
      const double dw = n.x() * jw[1] + n.y() * jw[2], dv = n.x() * jv[1] + n.y() * jv[2];
      total += s.weight * (kv * jw[0] * jv[0] + kr * dw * dv);
    }
  }
  for (int i = 0; i < mesh.num_segments(); ++i) {
    const ExtReal& eps = spec.corners[i].eps_c;
    if (eps.is_infinite())
      continue;
    const int dof = space.vertex_dof(mesh.corners()[i], 0);
    total += w[dof] * v[dof] / eps.value();
  }
  return total;
}

double energy_oracle(const ArgyrisSpace& space, const Material& material, const Eigen::VectorXd& w,
                     const Eigen::VectorXd& v) {
  const Mesh& mesh = space.mesh();
  // 8x8 Gauss product on the collapsed square; the integrand has degree 6
  std::vector<double> nodes, weights;
  gauss_legendre(8, nodes, weights);
  double total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(t);
    const Eigen::Vector2d p0 = mesh.vertex(tri[0]), p1 = mesh.vertex(tri[1]), p2 = mesh.vertex(tri[2]);
    const double area = mesh.area(t);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double s = 0.5 * (nodes[i] + 1.0), r = 0.5 * (nodes[j] + 1.0);
        // Duffy: (s, r) in [0,1]^2 -> barycentric (1 - s, s (1 - r), s r), jacobian s
        const Eigen::Vector2d x = (1.0 - s) * p0 + s * (1.0 - r) * p1 + s * r * p2;
        const double wq = 0.25 * weights[i] * weights[j] * s * 2.0 * area;
        const Eigen::Matrix2d hw = hessian(jet_in(space, t, x, w, 2));
        const Eigen::Matrix2d hv = hessian(jet_in(space, t, x, v, 2));
        const Eigen::Matrix2d m = moment_tensor(hw, material);
        total += wq * (m.cwiseProduct(-hv)).sum();
      }
  }
  return total;
}

double symmetry_error(const Eigen::SparseMatrix<double>& a) {
  const Eigen::MatrixXd d(a);
  const double scale = d.cwiseAbs().maxCoeff();
  return scale > 0.0 ? (d - d.transpose()).cwiseAbs().maxCoeff() / scale : 0.0;
}

Eigen::SparseMatrix<double> solved_matrix(const SparseSystem& sys) {
  if (!sys.elimination)
    return sys.matrix;
  const std::vector<int>& free = sys.elimination->free;
  Eigen::SparseMatrix<double> p(sys.size(), static_cast<int>(free.size()));
  for (std::size_t i = 0; i < free.size(); ++i)
    p.insert(free[i], static_cast<int>(i)) = 1.0;
  return Eigen::SparseMatrix<double>(p.transpose() * sys.matrix * p);
}

double min_eigenvalue(const Eigen::SparseMatrix<double>& a) {
  const Eigen::MatrixXd d(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<NamedProblem> experiment_problems() {
  std::vector<NamedProblem> out;
  const ClampedBenchmark b = clamped_benchmark();
  out.push_back({"clamped-benchmark", {b.material, b.load, BoundarySpec::preset(4, "clamped"), b.exact},
                 {Method::nitsche, Method::classical_eliminate}});
  const ExtReal inf = ExtReal::infinity();
  out.push_back({"corner-supported",
                 {Material::make(1.0, 0.3, 1.0), constant_load(1.0),
                  BoundarySpec::uniform(4, {inf, inf, constant_load(0.0), constant_load(0.0)}, {ExtReal(0.0), 0.0}),
                  std::nullopt},
                 {Method::nitsche}});
  for (double er : {1.0, 1e-2, 1e-4, 1e-6}) {
    const SegmentCondition seg{ExtReal(1.0), ExtReal(er), step_load('y', 0.75, 1.0, 0.0),
                               step_load('y', 0.25, 10.0, 0.0)};
    out.push_back({"step-loads eps_r=" + ExtReal(er).to_string(),
                   {Material::make(1.0, 0.0, 1.0), constant_load(0.0), BoundarySpec::uniform(4, seg, {inf, 0.0}),
                    std::nullopt},
                   {Method::nitsche, Method::classical_weak}});
  }
  return out;
}

double duality_error() {
  const ArgyrisReferenceBasis& basis = ArgyrisReferenceBasis::instance();
  const Matrix21 d = ArgyrisReferenceBasis::apply_dofs([&](const Eigen::Vector2d& p) { return basis.eval(p, 2); });
  return (d - Matrix21::Identity()).cwiseAbs().maxCoeff();
}

Mesh perturbed_square(int n, double jitter, std::mt19937& rng) {
  const Mesh base = build_unit_square_mesh(n);
  std::uniform_real_distribution<double> u(-jitter / n, jitter / n);
  std::vector<Point2> verts = base.vertices();
  for (auto& p : verts)
    if (p.x() > 1e-12 && p.x() < 1 - 1e-12 && p.y() > 1e-12 && p.y() < 1 - 1e-12)
      p += Eigen::Vector2d(u(rng), u(rng));
  return Mesh(verts, base.triangles(), base.boundary_tags(), base.corners(), base.levels());
}

double p5_reproduction_error(std::mt19937& rng, int max_order) {
  const ArgyrisSpace space(perturbed_square(3, 0.25, rng));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const Polynomial p = random_polynomial(5, rng);
    const Eigen::VectorXd c = space.interpolate(p.as_jet_function());
    for (int k = 0; k < 50; ++k) {
      const Eigen::Vector2d x(u(rng), u(rng));
      const Jet a = space.evaluate(std::span<const double>(c.data(), c.size()), x, max_order);
      const Jet e = p.jet(x);
      for (int s = 0; s < jet_size(max_order); ++s)
        worst = std::max(worst, std::abs(a[s] - e[s]) / std::max(1.0, std::abs(e[s])));
    }
  }
  return worst;
}

double c1_continuity_error(std::mt19937& rng) {
  const ArgyrisSpace space(perturbed_square(3, 0.25, rng));
  const Mesh& mesh = space.mesh();
  const Eigen::VectorXd c = random_vector(space.num_dofs(), rng);
  const double scale = c.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& ed = mesh.edge(e);
    if (ed.is_boundary())
      continue;
    const Eigen::Vector2d a = mesh.vertex(ed.v[0]), b = mesh.vertex(ed.v[1]);
    for (int k = 1; k <= 5; ++k) {
      const Eigen::Vector2d x = a + (k / 6.0) * (b - a);
      const Jet j0 = jet_in(space, ed.tri[0], x, c, 1), j1 = jet_in(space, ed.tri[1], x, c, 1);
      for (int s = 0; s < 3; ++s)
        worst = std::max(worst, std::abs(j0[s] - j1[s]) / scale);
    }
  }
  return worst;
}

double trace_fd_error(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0), angle(0.0, 2.0 * 3.141592653589793);
  const Material mat = Material::make(2.0, 0.3, 0.5);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Polynomial p = random_polynomial(4, rng);
    const Eigen::Vector2d x(u(rng), u(rng));
    const double th = angle(rng);
    const Eigen::Vector2d n(std::cos(th), std::sin(th));
    const Eigen::Vector2d s = tangent(n);
    auto moment = [&](const Eigen::Vector2d& y) { return moment_tensor(hessian(p.jet(y)), mat); };
    const double step = 1e-5;
    // Div M by central differences of M
    Eigen::Vector2d div = Eigen::Vector2d::Zero();
    for (int k = 0; k < 2; ++k) {
      const Eigen::Vector2d ek = Eigen::Vector2d::Unit(k) * step;
      const Eigen::Matrix2d dm = (moment(x + ek) - moment(x - ek)) / (2.0 * step);
      div += dm.col(k); // (Div M)_i = sum_k dM_ik / dx_k
    }
    const Eigen::Matrix2d m = moment(x);
    const double q = div.dot(n);
    const double dms = (n.dot(moment(x + step * s) * s) - n.dot(moment(x - step * s) * s)) / (2.0 * step);
    const TraceSet t = boundary_traces(p.jet(x), mat, n);
    const double g = p.jet(x)[1] * n.x() + p.jet(x)[2] * n.y();
    const double ref[] = {n.dot(m * n), n.dot(m * s), q, q + dms, g};
    const double got[] = {t.m_nn, t.m_ns, t.q_n, t.v_n, t.dn};
    for (int k = 0; k < 5; ++k) {
      const double scale = std::max({1e-3, std::abs(ref[k]), m.cwiseAbs().maxCoeff()});
      worst = std::max(worst, std::abs(got[k] - ref[k]) / scale);
    }
  }
  return worst;
}

double consistency_error(Method method, const std::vector<ExtReal>& eps_v, const std::vector<ExtReal>& eps_r,
                         const std::vector<ExtReal>& eps_c, int n, double gamma) {
  const Polynomial p = manufactured_quintic();
  const Material mat = Material::make(1.0, 0.3, 1.0);
  const ArgyrisSpace space(build_unit_square_mesh(n));
  const ExactSolution exact{p.as_jet_function()};
  PlateProblem prob{mat, bilaplacian_load(p, mat),
                    manufactured_boundary(space.mesh(), exact, mat, eps_v, eps_r, eps_c), exact};
  const SparseSystem sys = assemble(space, prob, method, gamma);
  const Solution sol = solve_spd(sys);
  const Eigen::VectorXd ref = space.interpolate(exact.jet);
  return (sol.coefficients - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
}

} // namespace plate::testing

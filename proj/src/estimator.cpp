#include "plate/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "fe_detail.hpp"
#include "plate/errors.hpp"
#include "plate/quadrature.hpp"

namespace plate {

namespace {

double sq(double x) { return x * x; }

// ||frac * p + inv * q||^2 from Gram entries pp, qq, pq; clipped at 0 against rounding.
double weighted_norm(double frac, double inv, double pp, double qq, double pq) {
  return std::sqrt(std::max(0.0, frac * frac * pp + 2.0 * frac * inv * pq + inv * inv * qq));
}

double sum_squares(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v)
    s += x * x;
  return s;
}

} // namespace

double EstimatorReport::recompute_eta_h() const {
  return std::sqrt(sum_squares(eta_K) + sum_squares(eta_V) + sum_squares(eta_M) + sum_squares(eta_v) +
                   sum_squares(eta_r) + sum_squares(eta_c));
}

EstimatorReport compute_estimators(const ArgyrisSpace& space, const Eigen::VectorXd& u, const PlateProblem& problem,
                                   const EstimatorOptions& options) {
  const Mesh& mesh = space.mesh();
  const Material& mat = problem.material;
  const BoundarySpec& spec = problem.boundary;
  spec.check_shape(mesh);
  if (u.size() != space.num_dofs())
    throw InvalidArgument("compute_estimators: solution does not match the space");
  const std::span<const double> coeffs(u.data(), u.size());
  const double d = mat.rigidity();

  const QuadratureRule tri_rule = make_triangle_rule(options.triangle_degree);
  const QuadratureRule edge_rule = make_edge_rule(options.edge_degree);

  EstimatorReport r;
  const int nt = mesh.num_triangles();
  r.eta_K.assign(nt, 0.0);
  r.residual.assign(nt, 0.0);
  for_each_index(options.execution, nt, [&](std::ptrdiff_t ti) {
    const int t = static_cast<int>(ti);
    const double det = space.geometry(t).det;
    double s = 0.0;
    for (std::size_t q = 0; q < tri_rule.size(); ++q) {
      const Jet j = space.eval_function(t, tri_rule.points[q], 4, coeffs);
      const double res = d * bilaplacian(j) - problem.load(space.to_physical(t, tri_rule.points[q]));
      s += tri_rule.weights[q] * det * res * res;
    }
    r.residual[t] = std::sqrt(s);
    r.eta_K[t] = sq(mesh.diameter(t)) * r.residual[t];
  });

  const int ne = mesh.num_edges();
  r.eta_V.assign(ne, 0.0);
  r.eta_M.assign(ne, 0.0);
  r.jump_V.assign(ne, 0.0);
  r.jump_M.assign(ne, 0.0);
  for_each_index(options.execution, ne, [&](std::ptrdiff_t ei) {
    const int e = static_cast<int>(ei);
    const Edge& ed = mesh.edge(e);
    if (ed.is_boundary())
      return;
    const int t0 = ed.tri[0], t1 = ed.tri[1];
    const Eigen::Vector2d n = mesh.global_normal(e);
    double sv = 0.0, sm = 0.0;
    for (const auto& p : detail::edge_points(space, t0, ed.local[0], edge_rule)) {
      const TraceSet a = boundary_traces(space.eval_function(t0, p.ref, 3, coeffs), mat, n);
      const TraceSet b = boundary_traces(space.eval_function(t1, space.to_reference(t1, p.x), 3, coeffs), mat, n);
      sv += p.weight * sq(a.v_n - b.v_n);
      sm += p.weight * sq(a.m_nn - b.m_nn);
    }
    const double h = mesh.edge_length(e);
    r.jump_V[e] = std::sqrt(sv);
    r.jump_M[e] = std::sqrt(sm);
    r.eta_V[e] = std::pow(h, 1.5) * r.jump_V[e];
    r.eta_M[e] = std::sqrt(h) * r.jump_M[e];
  });

  const auto& bnd = mesh.boundary_edges();
  const std::ptrdiff_t nb = static_cast<std::ptrdiff_t>(bnd.size());
  r.gram.assign(nb, {});
  r.eta_v.assign(nb, 0.0);
  r.eta_r.assign(nb, 0.0);
  for_each_index(options.execution, nb, [&](std::ptrdiff_t k) {
    const int e = bnd[k];
    const Edge& ed = mesh.edge(e);
    const int t = ed.tri[0], j = ed.local[0];
    const SegmentCondition& seg = spec.segments[ed.segment - 1];
    const Eigen::Vector2d n = mesh.outward_normal(e);
    const auto [pa, pb] = detail::edge_ends(mesh, t, j);
    BoundaryGram g;
    for (const auto& p : detail::edge_points(space, t, j, edge_rule,
                                             detail::merge_breaks(seg.g_v.breaks(pa, pb), seg.g_r.breaks(pa, pb)))) {
      const TraceSet s = boundary_traces(space.eval_function(t, p.ref, 3, coeffs), mat, n);
      const double v = s.v_n - seg.g_v(p.x), m = s.m_nn - seg.g_r(p.x);
      g.uu += p.weight * s.w * s.w;
      g.dd += p.weight * s.dn * s.dn;
      g.vv += p.weight * v * v;
      g.mm += p.weight * m * m;
      g.uv += p.weight * s.w * v;
      g.dm += p.weight * s.dn * m;
    }
    r.gram[k] = g;
    const double h = mesh.edge_length(e);
    const double a3 = h * h * h;
    // R^v = eps (V_n - g) + u scaled by h^{3/2}/(eps + h^3); R^r = eps (M_nn - g) - d_n u scaled by h^{1/2}/(eps + h)
    r.eta_v[k] = std::pow(h, 1.5) *
                 weighted_norm(seg.eps_v.fraction_weight(a3), seg.eps_v.inverse_weight(a3), g.vv, g.uu, g.uv);
    r.eta_r[k] = std::sqrt(h) *
                 weighted_norm(seg.eps_r.fraction_weight(h), -seg.eps_r.inverse_weight(h), g.mm, g.dd, g.dm);
  });

  const int m = mesh.num_segments();
  r.corners.assign(m, {});
  r.eta_c.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    const auto [e_leave, e_arrive] = mesh.corner_edges(i);
    const int t0 = mesh.edge(e_leave).tri[0], t1 = mesh.edge(e_arrive).tri[0];
    const Eigen::Vector2d c = mesh.vertex(mesh.corners()[i]);
    const Jet j0 = space.eval_function(t0, space.to_reference(t0, c), 2, coeffs);
    const Jet j1 = space.eval_function(t1, space.to_reference(t1, c), 2, coeffs);
    const double jump =
        corner_twist_jump(j0, mesh.outward_normal(e_leave), j1, mesh.outward_normal(e_arrive), mat);
    const CornerCondition& cc = spec.corners[i];
    r.corners[i] = {j0[0], jump - cc.g_c};
    const double hi = mesh.corner_size(i);
    const double a2 = hi * hi;
    r.eta_c[i] = hi * std::abs(cc.eps_c.fraction_weight(a2) * r.corners[i].jump_data +
                               cc.eps_c.inverse_weight(a2) * r.corners[i].value);
  }

  r.eta_h = std::sqrt(sum_squares(r.eta_K) + sum_squares(r.eta_V) + sum_squares(r.eta_M) + sum_squares(r.eta_v) +
                      sum_squares(r.eta_r) + sum_squares(r.eta_c));
  return r;
}

IndicatorVariant parse_variant(const std::string& name) {
  if (name == "ex1")
    return IndicatorVariant::ex1;
  if (name == "ex2")
    return IndicatorVariant::ex2;
  if (name == "ex3-nitsche")
    return IndicatorVariant::ex3_nitsche;
  if (name == "ex3-classical")
    return IndicatorVariant::ex3_classical;
  if (name == "weighted")
    return IndicatorVariant::weighted;
  throw InvalidArgument("unknown indicator variant '" + name + "'");
}

std::string to_string(IndicatorVariant v) {
  switch (v) {
  case IndicatorVariant::ex1:
    return "ex1";
  case IndicatorVariant::ex2:
    return "ex2";
  case IndicatorVariant::ex3_nitsche:
    return "ex3-nitsche";
  case IndicatorVariant::ex3_classical:
    return "ex3-classical";
  case IndicatorVariant::weighted:
    return "weighted";
  }
  return "?";
}

bool indicator_fits(const BoundarySpec& spec, IndicatorVariant variant) {
  bool fits = true;
  switch (variant) {
  case IndicatorVariant::ex1:
    fits = spec.all_clamped();
    break;
  case IndicatorVariant::ex2:
    for (const auto& s : spec.segments)
      fits = fits && s.eps_v.is_infinite() && s.eps_r.is_infinite();
    for (const auto& c : spec.corners)
      fits = fits && c.eps_c.is_zero();
    break;
  case IndicatorVariant::ex3_nitsche:
  case IndicatorVariant::ex3_classical:
    for (const auto& c : spec.corners)
      fits = fits && c.eps_c.is_infinite();
    if (variant == IndicatorVariant::ex3_classical)
      for (const auto& s : spec.segments)
        fits = fits && !s.eps_v.is_zero() && !s.eps_r.is_zero() && !s.eps_v.is_infinite() &&
               !s.eps_r.is_infinite();
    break;
  case IndicatorVariant::weighted:
    break;
  }
  return fits;
}

IndicatorVariant default_variant(const BoundarySpec& spec, Method method) {
  if (indicator_fits(spec, IndicatorVariant::ex1))
    return IndicatorVariant::ex1;
  if (indicator_fits(spec, IndicatorVariant::ex2))
    return IndicatorVariant::ex2;
  const IndicatorVariant ex3 =
      method == Method::classical_weak ? IndicatorVariant::ex3_classical : IndicatorVariant::ex3_nitsche;
  if (indicator_fits(spec, ex3))
    return ex3;
  return IndicatorVariant::weighted;
}

std::vector<double> aggregate_elementwise(const EstimatorReport& report, const Mesh& mesh, const BoundarySpec& spec,
                                          IndicatorVariant variant) {
  const int nt = mesh.num_triangles();
  if (static_cast<int>(report.eta_K.size()) != nt || report.gram.size() != mesh.boundary_edges().size())
    throw InvalidArgument("aggregate_elementwise: report does not match the mesh");
  spec.check_shape(mesh);

  if (!indicator_fits(spec, variant))
    throw InvalidArgument("indicator variant " + to_string(variant) + " does not match the boundary conditions");

  std::vector<double> ek(nt, 0.0);
  std::vector<double> jv2(nt, 0.0), jm2(nt, 0.0), bnd(nt, 0.0);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& ed = mesh.edge(e);
    if (ed.is_boundary())
      continue;
    for (int t : ed.tri) {
      jv2[t] += sq(report.jump_V[e]);
      jm2[t] += sq(report.jump_M[e]);
    }
  }

  // boundary parts per element: squared norms accumulate over the element's boundary edges
  const auto& bedges = mesh.boundary_edges();
  std::vector<std::vector<std::pair<int, int>>> edges_of(nt); // (segment, boundary index)
  for (std::size_t k = 0; k < bedges.size(); ++k) {
    const Edge& ed = mesh.edge(bedges[k]);
    edges_of[ed.tri[0]].push_back({ed.segment - 1, static_cast<int>(k)});
  }

  for (int t = 0; t < nt; ++t) {
    const double h = mesh.diameter(t);
    double val = sq(h) * report.residual[t] + 0.5 * std::pow(h, 1.5) * std::sqrt(jv2[t]) +
                 0.5 * std::sqrt(h) * std::sqrt(jm2[t]);
    double b1 = 0.0, b2 = 0.0; // squared norms of the two boundary residuals over dK cap dOmega
    for (const auto& [s, k] : edges_of[t]) {
      const BoundaryGram& g = report.gram[k];
      const SegmentCondition& seg = spec.segments[s];
      switch (variant) {
      case IndicatorVariant::ex1:
        b1 += g.uu;
        b2 += g.dd;
        break;
      case IndicatorVariant::ex2:
        b1 += g.vv;
        b2 += g.mm;
        break;
      case IndicatorVariant::ex3_nitsche:
      case IndicatorVariant::weighted: {
        const double a3 = h * h * h;
        b1 += sq(weighted_norm(seg.eps_v.fraction_weight(a3), seg.eps_v.inverse_weight(a3), g.vv, g.uu, g.uv));
        b2 += sq(weighted_norm(seg.eps_r.fraction_weight(h), -seg.eps_r.inverse_weight(h), g.mm, g.dd, g.dm));
        break;
      }
      case IndicatorVariant::ex3_classical: {
        const double kv = 1.0 / seg.eps_v.value(), kr = 1.0 / seg.eps_r.value();
        b1 += sq(weighted_norm(1.0, kv, g.vv, g.uu, g.uv));
        b2 += sq(weighted_norm(1.0, -kr, g.mm, g.dd, g.dm));
        break;
      }
      }
    }
    val += std::pow(h, 1.5) * std::sqrt(b1) + std::sqrt(h) * std::sqrt(b2);

    const auto& tri = mesh.triangle(t);
    for (int v : tri) {
      const int i = mesh.corner_index(v);
      if (i < 0)
        continue;
      switch (variant) {
      case IndicatorVariant::ex1:
      case IndicatorVariant::ex2:
        val += std::abs(report.corners[i].value) / h;
        break;
      case IndicatorVariant::ex3_nitsche:
        val += h * std::abs(report.corners[i].jump_data);
        break;
      case IndicatorVariant::ex3_classical:
        break;
      case IndicatorVariant::weighted: {
        const ExtReal& eps = spec.corners[i].eps_c;
        const double a2 = h * h;
        val += h * std::abs(eps.fraction_weight(a2) * report.corners[i].jump_data +
                            eps.inverse_weight(a2) * report.corners[i].value);
        break;
      }
      }
    }
    ek[t] = val;
  }
  return ek;
}

double NormReport::total() const { return std::sqrt(std::max(0.0, energy + deflection + rotation + corner)); }

NormReport mesh_norm_error(const ArgyrisSpace& space, const Eigen::VectorXd& u, const ExactSolution& exact,
                           const PlateProblem& problem, const EstimatorOptions& options) {
  const Mesh& mesh = space.mesh();
  const Material& mat = problem.material;
  const BoundarySpec& spec = problem.boundary;
  spec.check_shape(mesh);
  const std::span<const double> coeffs(u.data(), u.size());
  const double d = mat.rigidity(), nu = mat.poisson;
  const QuadratureRule tri_rule = make_triangle_rule(options.triangle_degree);
  const QuadratureRule edge_rule = make_edge_rule(options.edge_degree);

  const int nt = mesh.num_triangles();
  std::vector<double> energy(nt, 0.0);
  for_each_index(options.execution, nt, [&](std::ptrdiff_t ti) {
    const int t = static_cast<int>(ti);
    const double det = space.geometry(t).det;
    double s = 0.0;
    for (std::size_t q = 0; q < tri_rule.size(); ++q) {
      const Jet e = exact.jet(space.to_physical(t, tri_rule.points[q])) -
                    space.eval_function(t, tri_rule.points[q], 2, coeffs);
      const double exx = e[3], exy = e[4], eyy = e[5];
      s += tri_rule.weights[q] * det * d *
           ((1.0 - nu) * (exx * exx + 2.0 * exy * exy + eyy * eyy) + nu * sq(exx + eyy));
    }
    energy[t] = s;
  });

  const auto& bnd = mesh.boundary_edges();
  std::vector<double> defl(bnd.size(), 0.0), rot(bnd.size(), 0.0);
  for_each_index(options.execution, static_cast<std::ptrdiff_t>(bnd.size()), [&](std::ptrdiff_t k) {
    const int e = bnd[k];
    const Edge& ed = mesh.edge(e);
    const int t = ed.tri[0];
    const SegmentCondition& seg = spec.segments[ed.segment - 1];
    const Eigen::Vector2d n = mesh.outward_normal(e);
    double s0 = 0.0, s1 = 0.0;
    for (const auto& p : detail::edge_points(space, t, ed.local[0], edge_rule)) {
      const Jet err = exact.jet(p.x) - space.eval_function(t, p.ref, 1, coeffs);
      s0 += p.weight * err[0] * err[0];
      s1 += p.weight * sq(n.x() * err[1] + n.y() * err[2]);
    }
    const double h = mesh.edge_length(e);
    defl[k] = seg.eps_v.inverse_weight(h * h * h) * s0;
    rot[k] = seg.eps_r.inverse_weight(h) * s1;
  });

  NormReport r;
  for (double x : energy)
    r.energy += x;
  for (std::size_t k = 0; k < bnd.size(); ++k) {
    r.deflection += defl[k];
    r.rotation += rot[k];
  }
  for (int i = 0; i < mesh.num_segments(); ++i) {
    const Eigen::Vector2d c = mesh.vertex(mesh.corners()[i]);
    const double e0 = exact.jet(c)[0] - space.evaluate(coeffs, c, 0)[0];
    const double hi = mesh.corner_size(i);
    r.corner += spec.corners[i].eps_c.inverse_weight(hi * hi) * e0 * e0;
  }
  return r;
}

Oscillations compute_oscillations(const Mesh& mesh, const PlateProblem& problem, const EstimatorOptions& options) {
  const BoundarySpec& spec = problem.boundary;
  spec.check_shape(mesh);
  const QuadratureRule tri_rule = make_triangle_rule(options.triangle_degree);
  const QuadratureRule edge_rule = make_edge_rule(options.edge_degree);

  Oscillations osc;
  const int nt = mesh.num_triangles();
  osc.osc_K.assign(nt, 0.0);
  const LoadFunction& f = problem.load;
  const bool f_in_p1 = f.polynomial_degree >= 0 && f.polynomial_degree <= 1;
  if (!f_in_p1) {
    for_each_index(options.execution, nt, [&](std::ptrdiff_t ti) {
      const int t = static_cast<int>(ti);
      const auto& tri = mesh.triangle(t);
      const Eigen::Vector2d p0 = mesh.vertex(tri[0]);
      Eigen::Matrix2d jac;
      jac.col(0) = mesh.vertex(tri[1]) - p0;
      jac.col(1) = mesh.vertex(tri[2]) - p0;
      const double det = jac.determinant();
      Eigen::Matrix3d mass = Eigen::Matrix3d::Zero();
      Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
      std::vector<double> fv(tri_rule.size());
      for (std::size_t q = 0; q < tri_rule.size(); ++q) {
        const Eigen::Vector2d& r = tri_rule.points[q];
        const Eigen::Vector3d phi(1.0, r.x(), r.y());
        fv[q] = f(p0 + jac * r);
        mass += tri_rule.weights[q] * phi * phi.transpose();
        rhs += tri_rule.weights[q] * fv[q] * phi;
      }
      const Eigen::Vector3d c = mass.ldlt().solve(rhs);
      double s = 0.0;
      for (std::size_t q = 0; q < tri_rule.size(); ++q) {
        const Eigen::Vector2d& r = tri_rule.points[q];
        s += tri_rule.weights[q] * det * sq(fv[q] - (c[0] + c[1] * r.x() + c[2] * r.y()));
      }
      osc.osc_K[t] = sq(mesh.diameter(t)) * std::sqrt(s);
    });
  }

  // ||g - mean(g)|| on the edge a -> b, split at the data breakpoints
  auto p0_distance = [&](const LoadFunction& g, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    if (g.polynomial_degree == 0)
      return 0.0;
    std::vector<double> cuts{0.0};
    auto br = g.breaks(a, b);
    std::sort(br.begin(), br.end());
    for (double x : br)
      if (x > cuts.back() && x < 1.0)
        cuts.push_back(x);
    cuts.push_back(1.0);
    const double len = (b - a).norm();
    std::vector<std::pair<double, double>> samples; // (weight, value)
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
      for (std::size_t q = 0; q < edge_rule.size(); ++q) {
        const double s = cuts[k] + (cuts[k + 1] - cuts[k]) * edge_rule.points[q].x();
        samples.push_back({edge_rule.weights[q] * (cuts[k + 1] - cuts[k]) * len, g(a + s * (b - a))});
      }
    double mean = 0.0;
    for (const auto& [w, v] : samples)
      mean += w * v;
    mean /= len;
    double s = 0.0;
    for (const auto& [w, v] : samples)
      s += w * sq(v - mean);
    return std::sqrt(s);
  };

  const auto& bnd = mesh.boundary_edges();
  osc.osc_v.assign(bnd.size(), 0.0);
  osc.osc_r.assign(bnd.size(), 0.0);
  for (std::size_t k = 0; k < bnd.size(); ++k) {
    const Edge& ed = mesh.edge(bnd[k]);
    const SegmentCondition& seg = spec.segments[ed.segment - 1];
    const Eigen::Vector2d a = mesh.vertex(ed.v[0]), b = mesh.vertex(ed.v[1]);
    const double h = (b - a).norm();
    osc.osc_v[k] = std::pow(h, 1.5) * seg.eps_v.fraction_weight(h * h * h) * p0_distance(seg.g_v, a, b);
    osc.osc_r[k] = std::sqrt(h) * seg.eps_r.fraction_weight(h) * p0_distance(seg.g_r, a, b);
  }
  return osc;
}

void write_estimator_csv(std::ostream& out, const EstimatorReport& report, const std::string& comment) {
  if (!comment.empty())
    out << "# " << comment << '\n';
  out << "kind,id,value\n";
  out << std::setprecision(17);
  auto rows = [&](const char* kind, const std::vector<double>& v, bool skip_zero) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!skip_zero || v[i] != 0.0)
        out << kind << ',' << i << ',' << v[i] << '\n';
  };
  rows("eta_K", report.eta_K, false);
  rows("eta_V", report.eta_V, true);
  rows("eta_M", report.eta_M, true);
  rows("eta_v", report.eta_v, false);
  rows("eta_r", report.eta_r, false);
  rows("eta_c", report.eta_c, false);
  out << "eta_h,-1," << report.eta_h << '\n';
}

} // namespace plate

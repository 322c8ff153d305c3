#include "plate/assembly.hpp"

#include <cmath>
#include <string>

#include "fe_detail.hpp"
#include "plate/errors.hpp"
#include "plate/quadrature.hpp"

namespace plate {

namespace {

using detail::Row21;
using Vector42 = Eigen::Matrix<double, 2 * kArgyrisDofs, 1>;
using Matrix42 = Eigen::Matrix<double, 2 * kArgyrisDofs, 2 * kArgyrisDofs>;

struct LocalBlock {
  Matrix21 k = Matrix21::Zero();
  Vector21 f = Vector21::Zero();
};

struct CornerBlock {
  Matrix42 k = Matrix42::Zero();
  Vector42 f = Vector42::Zero();
  int t0 = -1, t1 = -1;
};

void scatter(PartialSystem& sys, const ArgyrisSpace& space, int t, const LocalBlock& b) {
  const auto& dofs = space.dofs(t);
  const auto& sg = space.signs(t);
  for (int i = 0; i < kArgyrisDofs; ++i) {
    sys.rhs[dofs[i]] += sg[i] * b.f[i];
    for (int j = 0; j < kArgyrisDofs; ++j)
      if (b.k(i, j) != 0.0)
        sys.triplets.emplace_back(dofs[i], dofs[j], sg[i] * sg[j] * b.k(i, j));
  }
}

void scatter(PartialSystem& sys, const ArgyrisSpace& space, const CornerBlock& b) {
  std::array<int, 2 * kArgyrisDofs> dofs;
  std::array<double, 2 * kArgyrisDofs> sg;
  for (int i = 0; i < kArgyrisDofs; ++i) {
    dofs[i] = space.dofs(b.t0)[i];
    sg[i] = space.signs(b.t0)[i];
    dofs[kArgyrisDofs + i] = space.dofs(b.t1)[i];
    sg[kArgyrisDofs + i] = space.signs(b.t1)[i];
  }
  for (int i = 0; i < 2 * kArgyrisDofs; ++i) {
    sys.rhs[dofs[i]] += sg[i] * b.f[i];
    for (int j = 0; j < 2 * kArgyrisDofs; ++j)
      if (b.k(i, j) != 0.0)
        sys.triplets.emplace_back(dofs[i], dofs[j], sg[i] * sg[j] * b.k(i, j));
  }
}

// Boundary edge e as (triangle, local edge).
std::pair<int, int> edge_owner(const Mesh& mesh, int e) {
  const Edge& ed = mesh.edge(e);
  return {ed.tri[0], ed.local[0]};
}

// Value and twist-jump rows at corner i over the concatenated DOFs of the two boundary elements.
struct CornerRows {
  int t0, t1;
  Vector42 w, jump;
};

CornerRows corner_rows(const ArgyrisSpace& space, const Material& mat, int i) {
  const Mesh& mesh = space.mesh();
  const auto [e_leave, e_arrive] = mesh.corner_edges(i);
  const int t0 = mesh.edge(e_leave).tri[0];
  const int t1 = mesh.edge(e_arrive).tri[0];
  const Eigen::Vector2d c = mesh.vertex(mesh.corners()[i]);
  const auto r0 = detail::trace_rows(space.eval_basis(t0, space.to_reference(t0, c), 2), mat,
                                     mesh.outward_normal(e_leave));
  const auto r1 = detail::trace_rows(space.eval_basis(t1, space.to_reference(t1, c), 2), mat,
                                     mesh.outward_normal(e_arrive));
  CornerRows cr{t0, t1, Vector42::Zero(), Vector42::Zero()};
  cr.w.head<kArgyrisDofs>() = r0.w.transpose();
  cr.jump.head<kArgyrisDofs>() = r0.m_ns.transpose();
  cr.jump.tail<kArgyrisDofs>() = -r1.m_ns.transpose();
  return cr;
}

PartialSystem collect(const ArgyrisSpace& space, const std::vector<std::pair<int, LocalBlock>>& edge_blocks,
                      const std::vector<CornerBlock>& corner_blocks) {
  PartialSystem sys(space.num_dofs());
  for (const auto& [t, b] : edge_blocks)
    scatter(sys, space, t, b);
  for (const auto& b : corner_blocks)
    scatter(sys, space, b);
  return sys;
}

} // namespace

PartialSystem& PartialSystem::operator+=(const PartialSystem& other) {
  if (other.n != n)
    throw InvalidArgument("PartialSystem: size mismatch");
  triplets.insert(triplets.end(), other.triplets.begin(), other.triplets.end());
  rhs += other.rhs;
  return *this;
}

SparseSystem PartialSystem::finalize(double gamma) const {
  SparseSystem s;
  s.matrix.resize(n, n);
  s.matrix.setFromTriplets(triplets.begin(), triplets.end());
  s.matrix.makeCompressed();
  s.rhs = rhs;
  s.gamma = gamma;
  return s;
}

Method parse_method(const std::string& name) {
  if (name == "nitsche")
    return Method::nitsche;
  if (name == "classical-weak")
    return Method::classical_weak;
  if (name == "classical-eliminate")
    return Method::classical_eliminate;
  throw InvalidArgument("unknown method '" + name + "'");
}

std::string to_string(Method m) {
  switch (m) {
  case Method::nitsche:
    return "nitsche";
  case Method::classical_weak:
    return "classical-weak";
  case Method::classical_eliminate:
    return "classical-eliminate";
  }
  return "?";
}

PartialSystem assemble_interior(const ArgyrisSpace& space, const Material& material, const LoadFunction& f,
                                const AssemblyOptions& options) {
  const Mesh& mesh = space.mesh();
  const QuadratureRule rule = make_triangle_rule(options.triangle_degree);
  const auto& ref = ArgyrisReferenceBasis::instance();
  std::vector<BasisTable> ref_tables(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q)
    ref_tables[q] = ref.eval(rule.points[q], 2);

  const double d = material.rigidity(), nu = material.poisson;
  const bool zero_load = f.is_zero();
  std::vector<LocalBlock> blocks(mesh.num_triangles());
  for_each_index(options.execution, mesh.num_triangles(), [&](std::ptrdiff_t ti) {
    const int t = static_cast<int>(ti);
    const auto& geo = space.geometry(t);
    const Matrix21 ct = space.transformation(t).transpose();
    LocalBlock& b = blocks[t];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const BasisTable tab = geo.push_forward * ref_tables[q] * ct;
      const double w = rule.weights[q] * geo.det;
      const Row21 hxx = tab.row(3), hxy = tab.row(4), hyy = tab.row(5);
      const Row21 lap = hxx + hyy;
      b.k.noalias() += (w * d * (1.0 - nu)) *
                       (hxx.transpose() * hxx + 2.0 * hxy.transpose() * hxy + hyy.transpose() * hyy);
      b.k.noalias() += (w * d * nu) * (lap.transpose() * lap);
      if (!zero_load)
        b.f += (w * f(space.to_physical(t, rule.points[q]))) * tab.row(0).transpose();
    }
  });

  PartialSystem sys(space.num_dofs());
  sys.triplets.reserve(static_cast<std::size_t>(mesh.num_triangles()) * kArgyrisDofs * kArgyrisDofs);
  for (int t = 0; t < mesh.num_triangles(); ++t)
    scatter(sys, space, t, blocks[t]);
  return sys;
}

PartialSystem assemble_nitsche_boundary(const ArgyrisSpace& space, const Material& material,
                                        const BoundarySpec& spec, double gamma,
                                        const AssemblyOptions& options) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw InvalidArgument("Nitsche: gamma must be positive");
  const Mesh& mesh = space.mesh();
  spec.check_shape(mesh);
  const QuadratureRule rule = make_edge_rule(options.edge_degree);
  const auto& bnd = mesh.boundary_edges();

  std::vector<std::pair<int, LocalBlock>> edge_blocks(bnd.size());
  for_each_index(options.execution, static_cast<std::ptrdiff_t>(bnd.size()), [&](std::ptrdiff_t k) {
    const int e = bnd[k];
    const auto [t, j] = edge_owner(mesh, e);
    const SegmentCondition& seg = spec.segments[mesh.edge(e).segment - 1];
    const double h = mesh.edge_length(e);
    const Eigen::Vector2d n = mesh.outward_normal(e);
    const double av = gamma * h * h * h, ar = gamma * h;
    const double inv_v = seg.eps_v.inverse_weight(av), frac_v = seg.eps_v.fraction_weight(av);
    const double inv_r = seg.eps_r.inverse_weight(ar), frac_r = seg.eps_r.fraction_weight(ar);
    const auto [pa, pb] = detail::edge_ends(mesh, t, j);
    const auto pts = detail::edge_points(space, t, j, rule,
                                         detail::merge_breaks(seg.g_v.breaks(pa, pb), seg.g_r.breaks(pa, pb)));
    LocalBlock b;
    for (const auto& p : pts) {
      const auto r = detail::trace_rows(space.eval_basis(t, p.ref, 3), material, n);
      const double wq = p.weight;
      // b_h
      b.k.noalias() += (wq * inv_v) * (r.w.transpose() * r.w);
      b.k.noalias() -= (wq * av * inv_v) * (r.v_n.transpose() * r.w + r.w.transpose() * r.v_n);
      b.k.noalias() -= (wq * av * frac_v) * (r.v_n.transpose() * r.v_n);
      // c_h
      b.k.noalias() += (wq * ar * inv_r) * (r.m_nn.transpose() * r.dn + r.dn.transpose() * r.m_nn);
      b.k.noalias() -= (wq * ar * frac_r) * (r.m_nn.transpose() * r.m_nn);
      b.k.noalias() += (wq * inv_r) * (r.dn.transpose() * r.dn);
      // f_h, g_h
      const double gv = seg.g_v(p.x), gr = seg.g_r(p.x);
      b.f += (wq * frac_v * gv) * (r.w - av * r.v_n).transpose();
      b.f -= (wq * frac_r * gr) * (r.dn + ar * r.m_nn).transpose();
    }
    edge_blocks[k] = {t, b};
  });

  const int m = mesh.num_segments();
  std::vector<CornerBlock> corner_blocks(m);
  for_each_index(options.execution, m, [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    const CornerCondition& cc = spec.corners[i];
    const double hi = mesh.corner_size(i);
    const double ac = gamma * hi * hi;
    const double inv_c = cc.eps_c.inverse_weight(ac), frac_c = cc.eps_c.fraction_weight(ac);
    const CornerRows cr = corner_rows(space, material, i);
    CornerBlock& b = corner_blocks[i];
    b.t0 = cr.t0;
    b.t1 = cr.t1;
    b.k = -ac * inv_c * (cr.jump * cr.w.transpose() + cr.w * cr.jump.transpose()) -
          ac * frac_c * (cr.jump * cr.jump.transpose()) + inv_c * (cr.w * cr.w.transpose());
    b.f = frac_c * cc.g_c * (cr.w - ac * cr.jump);
  });

  return collect(space, edge_blocks, corner_blocks);
}

SparseSystem assemble_nitsche(const ArgyrisSpace& space, const PlateProblem& problem, double gamma,
                              const AssemblyOptions& options) {
  problem.boundary.validate(space.mesh());
  PartialSystem sys = assemble_interior(space, problem.material, problem.load, options);
  sys += assemble_nitsche_boundary(space, problem.material, problem.boundary, gamma, options);
  return sys.finalize(gamma);
}

std::vector<int> clamped_dofs(const ArgyrisSpace& space) {
  const Mesh& mesh = space.mesh();
  std::vector<char> fixed(space.num_dofs(), 0);
  for (int e : mesh.boundary_edges()) {
    const Eigen::Vector2d n = mesh.outward_normal(e);
    const bool horizontal = std::abs(n.x()) < 1e-12;
    const bool vertical = std::abs(n.y()) < 1e-12;
    if (!horizontal && !vertical)
      throw UnsupportedConfiguration("clamped elimination requires an axis-parallel rectangle");
    fixed[space.edge_dof(e)] = 1;
    for (int v : mesh.edge(e).v) {
      for (int c : {0, 1, 2, 4})
        fixed[space.vertex_dof(v, c)] = 1;
      // tangential second derivative: u_xx along horizontal edges, u_yy along vertical ones
      fixed[space.vertex_dof(v, horizontal ? 3 : 5)] = 1;
    }
  }
  std::vector<int> out;
  for (int i = 0; i < space.num_dofs(); ++i)
    if (fixed[i])
      out.push_back(i);
  return out;
}

SparseSystem assemble_classical(const ArgyrisSpace& space, const PlateProblem& problem, ClassicalMode mode,
                                const AssemblyOptions& options) {
  const Mesh& mesh = space.mesh();
  const BoundarySpec& spec = problem.boundary;
  spec.validate(mesh);
  PartialSystem sys = assemble_interior(space, problem.material, problem.load, options);

  if (mode == ClassicalMode::eliminate_clamped) {
    if (!spec.all_clamped())
      throw UnsupportedConfiguration("clamped elimination requires a fully clamped boundary");
    if (mesh.num_segments() != 4)
      throw UnsupportedConfiguration("clamped elimination requires an axis-parallel rectangle");
    Elimination elim;
    elim.fixed = clamped_dofs(space);
    elim.values.assign(elim.fixed.size(), 0.0);
    std::vector<char> is_fixed(space.num_dofs(), 0);
    for (int i : elim.fixed)
      is_fixed[i] = 1;
    for (int i = 0; i < space.num_dofs(); ++i)
      if (!is_fixed[i])
        elim.free.push_back(i);
    SparseSystem s = sys.finalize();
    s.elimination = std::move(elim);
    return s;
  }

  for (const auto& s : spec.segments)
    if (s.eps_v.is_zero() || s.eps_r.is_zero())
      throw UnsupportedConfiguration("classical weak form cannot impose eps = 0; use Nitsche");
  for (const auto& c : spec.corners)
    if (c.eps_c.is_zero())
      throw UnsupportedConfiguration("classical weak form cannot impose eps = 0; use Nitsche");

  const QuadratureRule rule = make_edge_rule(options.edge_degree);
  const auto& bnd = mesh.boundary_edges();
  std::vector<std::pair<int, LocalBlock>> edge_blocks(bnd.size());
  for_each_index(options.execution, static_cast<std::ptrdiff_t>(bnd.size()), [&](std::ptrdiff_t k) {
    const int e = bnd[k];
    const auto [t, j] = edge_owner(mesh, e);
    const SegmentCondition& seg = spec.segments[mesh.edge(e).segment - 1];
    const Eigen::Vector2d n = mesh.outward_normal(e);
    const double kv = seg.eps_v.is_infinite() ? 0.0 : 1.0 / seg.eps_v.value();
    const double kr = seg.eps_r.is_infinite() ? 0.0 : 1.0 / seg.eps_r.value();
    const auto [pa, pb] = detail::edge_ends(mesh, t, j);
    const auto pts = detail::edge_points(space, t, j, rule,
                                         detail::merge_breaks(seg.g_v.breaks(pa, pb), seg.g_r.breaks(pa, pb)));
    LocalBlock b;
    for (const auto& p : pts) {
      const BasisTable tab = space.eval_basis(t, p.ref, 1);
      const Row21 w = tab.row(0);
      const Row21 dn = n.x() * tab.row(1) + n.y() * tab.row(2);
      b.k.noalias() += (p.weight * kv) * (w.transpose() * w) + (p.weight * kr) * (dn.transpose() * dn);
      b.f += p.weight * (seg.g_v(p.x) * w - seg.g_r(p.x) * dn).transpose();
    }
    edge_blocks[k] = {t, b};
  });

  const int m = mesh.num_segments();
  std::vector<CornerBlock> corner_blocks(m);
  for (int i = 0; i < m; ++i) {
    const CornerCondition& cc = spec.corners[i];
    const double kc = cc.eps_c.is_infinite() ? 0.0 : 1.0 / cc.eps_c.value();
    const CornerRows cr = corner_rows(space, problem.material, i);
    CornerBlock& b = corner_blocks[i];
    b.t0 = cr.t0;
    b.t1 = cr.t1;
    b.k = kc * (cr.w * cr.w.transpose());
    b.f = cc.g_c * cr.w;
  }
  sys += collect(space, edge_blocks, corner_blocks);
  return sys.finalize();
}

SparseSystem assemble(const ArgyrisSpace& space, const PlateProblem& problem, Method method, double gamma,
                      const AssemblyOptions& options) {
  switch (method) {
  case Method::nitsche:
    return assemble_nitsche(space, problem, gamma, options);
  case Method::classical_weak:
    return assemble_classical(space, problem, ClassicalMode::weak_robin, options);
  case Method::classical_eliminate:
    return assemble_classical(space, problem, ClassicalMode::eliminate_clamped, options);
  }
  throw InvalidArgument("unknown method");
}

} // namespace plate

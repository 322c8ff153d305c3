#include "plate/plate_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "plate/errors.hpp"

namespace plate {

Material Material::make(double young, double poisson, double thickness) {
  if (!(young > 0.0))
    throw InvalidArgument("material: Young's modulus must be positive");
  if (!(thickness > 0.0))
    throw InvalidArgument("material: thickness must be positive");
  if (!(poisson >= 0.0 && poisson < 0.5))
    throw InvalidArgument("material: Poisson ratio must lie in [0, 1/2)");
  return Material{young, poisson, thickness};
}

double Material::rigidity() const {
  return young * thickness * thickness * thickness / (12.0 * (1.0 - poisson * poisson));
}

ExtReal::ExtReal(double value) {
  if (std::isnan(value) || value < 0.0)
    throw InvalidArgument("compliance must be a nonnegative number or infinity");
  infinite_ = std::isinf(value);
  value_ = infinite_ ? 0.0 : value;
}

double ExtReal::value() const {
  if (infinite_)
    throw InvalidArgument("ExtReal::value called on infinity");
  return value_;
}

std::string ExtReal::to_string() const {
  if (infinite_)
    return "inf";
  std::ostringstream s;
  s << value_;
  return s.str();
}

LoadFunction constant_load(double v) {
  LoadFunction f;
  std::ostringstream name;
  name << "constant:" << v;
  f.name = name.str();
  f.value = [v](const Eigen::Vector2d&) { return v; };
  f.polynomial_degree = 0;
  return f;
}

LoadFunction step_load(char axis, double threshold, double below, double above) {
  if (axis != 'x' && axis != 'y')
    throw InvalidArgument("step load: axis must be 'x' or 'y'");
  const int k = axis == 'x' ? 0 : 1;
  LoadFunction f;
  std::ostringstream name;
  name << "step:" << axis << ':' << threshold << ':' << below << ':' << above;
  f.name = name.str();
  f.value = [=](const Eigen::Vector2d& p) { return p[k] < threshold ? below : above; };
  f.breakpoints = [=](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    std::vector<double> t;
    const double da = a[k] - threshold, db = b[k] - threshold;
    if (da * db < 0.0)
      t.push_back(da / (da - db));
    return t;
  };
  f.polynomial_degree = -1;
  return f;
}

LoadFunction function_load(std::string name, std::function<double(const Eigen::Vector2d&)> fn) {
  LoadFunction f;
  f.name = std::move(name);
  f.value = std::move(fn);
  f.polynomial_degree = -1;
  return f;
}

namespace {

double parse_number(const std::string& s, const std::string& spec) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
      throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("load '" + spec + "': cannot parse number '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

} // namespace

LoadFunction parse_load(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts[0] == "constant" && parts.size() == 2)
    return constant_load(parse_number(parts[1], spec));
  if (parts[0] == "zero" && parts.size() == 1)
    return constant_load(0.0);
  if (parts[0] == "step" && parts.size() == 5) {
    if (parts[1].size() != 1)
      throw InvalidArgument("load '" + spec + "': axis must be x or y");
    return step_load(parts[1][0], parse_number(parts[2], spec), parse_number(parts[3], spec),
                     parse_number(parts[4], spec));
  }
  if (spec == "clamped-benchmark")
    return clamped_benchmark().load;
  throw InvalidArgument("unknown load '" + spec + "'");
}

BoundarySpec BoundarySpec::uniform(int m, const SegmentCondition& segment, const CornerCondition& corner) {
  BoundarySpec spec;
  spec.segments.assign(m, segment);
  spec.corners.assign(m, corner);
  return spec;
}

BoundarySpec BoundarySpec::preset(int m, const std::string& name) {
  const ExtReal zero(0.0), inf = ExtReal::infinity();
  if (name == "clamped")
    return uniform(m, {zero, zero, constant_load(0), constant_load(0)}, {zero, 0.0});
  if (name == "simply-supported")
    return uniform(m, {zero, inf, constant_load(0), constant_load(0)}, {zero, 0.0});
  if (name == "free")
    return uniform(m, {inf, inf, constant_load(0), constant_load(0)}, {inf, 0.0});
  throw InvalidArgument("unknown boundary preset '" + name + "'");
}

void BoundarySpec::check_shape(const Mesh& mesh) const {
  const std::size_t m = static_cast<std::size_t>(mesh.num_segments());
  if (segments.size() != m || corners.size() != m)
    throw InvalidArgument("boundary spec: expected " + std::to_string(m) + " segments and corners");
  for (const auto& s : segments)
    if (!s.g_v.value || !s.g_r.value)
      throw InvalidArgument("boundary spec: missing segment load");
  for (const auto& c : corners)
    if (!std::isfinite(c.g_c))
      throw InvalidArgument("boundary spec: corner load must be finite");
}

void BoundarySpec::validate(const Mesh& mesh) const {
  check_shape(mesh);
  bool supported = false;
  for (const auto& s : segments)
    supported = supported || !s.eps_v.is_infinite() || !s.eps_r.is_infinite();
  for (const auto& c : corners)
    supported = supported || !c.eps_c.is_infinite();
  if (!supported)
    throw InvalidArgument("boundary spec: the plate is not supported anywhere (rigid-body modes)");
}

bool BoundarySpec::all_clamped() const {
  for (const auto& s : segments)
    if (!s.eps_v.is_zero() || !s.eps_r.is_zero())
      return false;
  for (const auto& c : corners)
    if (!c.eps_c.is_zero())
      return false;
  return true;
}

Eigen::Matrix2d hessian(const Jet& j) {
  Eigen::Matrix2d h;
  h << j[3], j[4], j[4], j[5];
  return h;
}

Eigen::Matrix2d moment_tensor(const Eigen::Matrix2d& hess, const Material& mat) {
  const Eigen::Matrix2d curvature = -hess;
  const double nu = mat.poisson;
  const double factor = mat.young * std::pow(mat.thickness, 3) / (12.0 * (1.0 + nu));
  return factor * (curvature + nu / (1.0 - nu) * curvature.trace() * Eigen::Matrix2d::Identity());
}

TraceSet boundary_traces(const Jet& j, const Material& mat, const Eigen::Vector2d& n) {
  const Eigen::Vector2d s = tangent(n);
  const Eigen::Matrix2d m = moment_tensor(hessian(j), mat);
  Eigen::Matrix2d dhx, dhy;
  dhx << j[6], j[7], j[7], j[8];
  dhy << j[7], j[8], j[8], j[9];
  const Eigen::Matrix2d dmx = moment_tensor(dhx, mat);
  const Eigen::Matrix2d dmy = moment_tensor(dhy, mat);
  const Eigen::Vector2d q(dmx(0, 0) + dmy(0, 1), dmx(0, 1) + dmy(1, 1));

  TraceSet tr;
  tr.w = j[0];
  tr.dn = n.x() * j[1] + n.y() * j[2];
  tr.m_nn = n.dot(m * n);
  tr.m_ns = s.dot(m * n);
  tr.q_n = q.dot(n);
  tr.v_n = tr.q_n + s.dot((s.x() * dmx + s.y() * dmy) * n);
  return tr;
}

double corner_twist_jump(const Jet& leaving, const Eigen::Vector2d& n_leaving, const Jet& arriving,
                         const Eigen::Vector2d& n_arriving, const Material& mat) {
  const Eigen::Matrix2d ml = moment_tensor(hessian(leaving), mat);
  const Eigen::Matrix2d ma = moment_tensor(hessian(arriving), mat);
  return tangent(n_leaving).dot(ml * n_leaving) - tangent(n_arriving).dot(ma * n_arriving);
}

Jet clamped_benchmark_jet(const Eigen::Vector2d& x) {
  constexpr double pi = std::numbers::pi;
  auto factor = [](double t) {
    const double s2 = std::sin(2 * pi * t), c2 = std::cos(2 * pi * t), s = std::sin(pi * t);
    return std::array<double, 5>{s * s, pi * s2, 2 * pi * pi * c2, -4 * pi * pi * pi * s2,
                                 -8 * pi * pi * pi * pi * c2};
  };
  const auto fx = factor(x.x()), fy = factor(x.y());
  Jet j{};
  for (int k = 0; k <= 4; ++k)
    for (int b = 0; b <= k; ++b)
      j[jet_index(k - b, b)] = fx[k - b] * fy[b];
  return j;
}

ClampedBenchmark clamped_benchmark() {
  ClampedBenchmark b;
  b.material = Material::make(1.0, 0.3, 1.0);
  const double d = b.material.rigidity();
  b.exact.jet = clamped_benchmark_jet;
  b.load = function_load("clamped-benchmark", [d](const Eigen::Vector2d& p) {
    constexpr double pi = std::numbers::pi;
    const double sx = std::sin(pi * p.x()), cx = std::cos(pi * p.x());
    const double sy = std::sin(pi * p.y()), cy = std::cos(pi * p.y());
    return 8 * std::pow(pi, 4) * d *
           (cx * cx * cy * cy - 2 * sx * sx * cy * cy - 2 * cx * cx * sy * sy + 3 * sx * sx * sy * sy);
  });
  return b;
}

BoundarySpec manufactured_boundary(const Mesh& mesh, const ExactSolution& exact, const Material& mat,
                                   const std::vector<ExtReal>& eps_v, const std::vector<ExtReal>& eps_r,
                                   const std::vector<ExtReal>& eps_c) {
  const int m = mesh.num_segments();
  if (static_cast<int>(eps_v.size()) != m || static_cast<int>(eps_r.size()) != m ||
      static_cast<int>(eps_c.size()) != m)
    throw InvalidArgument("manufactured_boundary: compliance arrays must have one entry per segment");

  // segments are straight: any edge of the segment gives its normal
  std::vector<Eigen::Vector2d> normal(m);
  for (int e : mesh.boundary_edges())
    normal[mesh.edge(e).segment - 1] = mesh.outward_normal(e);

  BoundarySpec spec;
  for (int i = 0; i < m; ++i) {
    const Eigen::Vector2d n = normal[i];
    const ExtReal ev = eps_v[i], er = eps_r[i];
    SegmentCondition seg{ev, er, {}, {}};
    seg.g_v = function_load("manufactured", [=](const Eigen::Vector2d& x) {
      const Jet j = exact.jet(x);
      const TraceSet t = boundary_traces(j, mat, n);
      return t.v_n + (ev.is_infinite() || ev.is_zero() ? 0.0 : t.w / ev.value());
    });
    seg.g_r = function_load("manufactured", [=](const Eigen::Vector2d& x) {
      const Jet j = exact.jet(x);
      const TraceSet t = boundary_traces(j, mat, n);
      return t.m_nn - (er.is_infinite() || er.is_zero() ? 0.0 : t.dn / er.value());
    });
    spec.segments.push_back(seg);
  }
  for (int i = 0; i < m; ++i) {
    const Eigen::Vector2d x = mesh.vertex(mesh.corners()[i]);
    const Jet j = exact.jet(x);
    const double jump = corner_twist_jump(j, normal[i], j, normal[(i + m - 1) % m], mat);
    const ExtReal ec = eps_c[i];
    spec.corners.push_back({ec, jump + (ec.is_infinite() || ec.is_zero() ? 0.0 : j[0] / ec.value())});
  }
  return spec;
}

} // namespace plate

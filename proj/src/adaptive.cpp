#include "plate/adaptive.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "plate/errors.hpp"

namespace plate {

LevelResult solve_level(const ProblemSetup& setup, const Mesh& mesh) {
  const auto start = std::chrono::steady_clock::now();
  LevelResult r;
  r.space = std::make_shared<const ArgyrisSpace>(mesh);
  const SparseSystem sys = assemble(*r.space, setup.problem, setup.method, setup.gamma, setup.assembly);
  r.solution = solve_spd(sys, setup.solver);
  r.report = compute_estimators(*r.space, r.solution.coefficients, setup.problem, setup.estimator);
  r.indicators = aggregate_elementwise(r.report, mesh, setup.problem.boundary, setup.variant);
  if (setup.problem.exact)
    r.error = mesh_norm_error(*r.space, r.solution.coefficients, *setup.problem.exact, setup.problem,
                              setup.estimator);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

namespace {

IterationRecord make_record(int iter, const ProblemSetup& setup, const Mesh& mesh, const LevelResult& r) {
  IterationRecord rec;
  rec.iter = iter;
  rec.dofs = r.space->num_dofs();
  rec.elements = mesh.num_triangles();
  rec.h = mesh.max_diameter();
  rec.eta = r.report.eta_h;
  double s = 0.0;
  for (double e : r.indicators)
    s += e * e;
  rec.eta_ek = std::sqrt(s);
  if (r.error)
    rec.err = r.error->total();
  if (setup.probe) {
    const auto& c = r.solution.coefficients;
    rec.u_probe = r.space->evaluate(std::span<const double>(c.data(), c.size()), *setup.probe, 0)[0];
  }
  rec.seconds = r.seconds;
  return rec;
}

ConvergenceHistory empty_history(const ProblemSetup& setup) {
  ConvergenceHistory h;
  h.method = to_string(setup.method);
  h.gamma = setup.gamma;
  h.seed = setup.seed;
  return h;
}

} // namespace

void ConvergenceHistory::write_csv(std::ostream& out) const {
  out << "# gamma=" << gamma << " method=" << method << " seed=" << seed;
  if (theta)
    out << " theta=" << *theta;
  out << '\n';
  out << "iter,N,h,eta,err,u_mid,seconds,eta_ek\n";
  out << std::setprecision(12);
  for (const auto& r : rows) {
    out << r.iter << ',' << r.dofs << ',' << r.h << ',' << r.eta << ',';
    if (r.err)
      out << *r.err;
    out << ',';
    if (r.u_probe)
      out << *r.u_probe;
    out << ',' << r.seconds << ',' << r.eta_ek << '\n';
  }
}

std::vector<int> dorfler_mark(std::span<const double> indicators, double theta) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw InvalidArgument("Dorfler marking: theta must lie in (0, 1]");
  std::vector<int> order(indicators.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return indicators[a] > indicators[b]; });
  double total = 0.0;
  for (int i : order)
    total += indicators[i] * indicators[i];
  const double target = theta * total;
  std::vector<int> marked;
  double sum = 0.0;
  for (int i : order) {
    marked.push_back(i);
    sum += indicators[i] * indicators[i];
    if (sum >= target && sum > 0.0)
      break;
  }
  return marked;
}

ConvergenceHistory run_uniform(const ProblemSetup& setup, int levels, const LevelObserver& observer) {
  if (levels < 1)
    throw InvalidArgument("run_uniform: levels must be >= 1");
  ConvergenceHistory hist = empty_history(setup);
  Mesh mesh = setup.initial_mesh;
  for (int l = 0; l < levels; ++l) {
    if (l > 0)
      mesh = uniform_refine(mesh);
    const LevelResult r = solve_level(setup, mesh);
    hist.rows.push_back(make_record(l, setup, mesh, r));
    if (observer)
      observer(l, mesh, r);
  }
  return hist;
}

ConvergenceHistory run_adaptive(const ProblemSetup& setup, int iterations, double theta,
                                const LevelObserver& observer) {
  if (iterations < 1)
    throw InvalidArgument("run_adaptive: iterations must be >= 1");
  if (!(theta > 0.0 && theta <= 1.0))
    throw InvalidArgument("run_adaptive: theta must lie in (0, 1]");
  ConvergenceHistory hist = empty_history(setup);
  hist.theta = theta;
  Mesh mesh = setup.initial_mesh;
  for (int it = 0; it < iterations; ++it) {
    const LevelResult r = solve_level(setup, mesh);
    hist.rows.push_back(make_record(it, setup, mesh, r));
    if (observer)
      observer(it, mesh, r);
    if (it + 1 < iterations) {
      const std::vector<int> marked = dorfler_mark(r.indicators, theta);
      mesh = bisect_marked(mesh, marked);
    }
  }
  return hist;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidArgument("loglog_slope: need at least two matching points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace plate

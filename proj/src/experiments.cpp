#include "plate/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "plate/errors.hpp"

namespace plate {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::ofstream open_output(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(12);
  return out;
}

void write_mesh_file(const fs::path& path, const Mesh& mesh) {
  std::ofstream out = open_output(path);
  write_mesh(out, mesh);
}

std::string seed_name(int n) { return "unit-square-n" + std::to_string(n); }

std::string format_double(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

double rate(double e0, double e1, double h0, double h1) { return std::log(e0 / e1) / std::log(h0 / h1); }

double slope_of_tail(const ConvergenceHistory& hist, std::size_t count) {
  const std::size_t k = hist.rows.size() > count ? hist.rows.size() - count : 0;
  std::vector<double> n, eta;
  for (std::size_t i = k; i < hist.rows.size(); ++i) {
    n.push_back(hist.rows[i].dofs);
    eta.push_back(hist.rows[i].eta);
  }
  return loglog_slope(n, eta);
}

void apply_execution(ProblemSetup& s, Execution exec) {
  s.assembly.execution = exec;
  s.estimator.execution = exec;
}

// --- config parsing -----------------------------------------------------------

int line_at(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of "key"; 0 when absent.
int line_of_key(const std::string& text, const std::string& key) {
  const std::size_t pos = text.find('"' + key + '"');
  return pos == std::string::npos ? 0 : line_at(text, pos);
}

class ConfigReader {
public:
  explicit ConfigReader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(key.empty() ? what : "'" + key + "': " + what, line_of_key(text_, key));
  }

  void check_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) const {
    if (!obj.is_object())
      fail(where, "expected an object");
    for (const auto& [k, v] : obj.items())
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
        fail(k, "unknown key" + (where.empty() ? std::string() : " in '" + where + "'"));
  }

  double number(const json& v, const std::string& key) const {
    if (!v.is_number())
      fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
      fail(key, "expected a finite number");
    return x;
  }

  int integer(const json& v, const std::string& key, int min) const {
    if (!v.is_number_integer())
      fail(key, "expected an integer");
    const long long x = v.get<long long>();
    if (x < min || x > 1'000'000)
      fail(key, "must be an integer >= " + std::to_string(min));
    return static_cast<int>(x);
  }

  std::string string(const json& v, const std::string& key) const {
    if (!v.is_string())
      fail(key, "expected a string");
    return v.get<std::string>();
  }

  ExtReal compliance(const json& v, const std::string& key) const {
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (s == "inf" || s == "infinity")
        return ExtReal::infinity();
      fail(key, "expected a nonnegative number or \"inf\"");
    }
    const double x = number(v, key);
    if (x < 0.0)
      fail(key, "compliance must be nonnegative");
    return ExtReal(x);
  }

  LoadFunction load(const json& v, const std::string& key) const {
    if (v.is_number())
      return constant_load(number(v, key));
    try {
      return parse_load(string(v, key));
    } catch (const InvalidArgument& e) {
      fail(key, e.what());
    }
  }

private:
  const std::string& text_;
};

void read_segment(const ConfigReader& rd, const json& obj, SegmentCondition& seg) {
  rd.check_keys(obj, {"preset", "eps_v", "eps_r", "g_v", "g_r"}, "segments");
  if (obj.contains("preset")) {
    const std::string name = rd.string(obj["preset"], "preset");
    try {
      seg = BoundarySpec::preset(1, name).segments[0];
    } catch (const InvalidArgument& e) {
      rd.fail("preset", e.what());
    }
  }
  if (obj.contains("eps_v"))
    seg.eps_v = rd.compliance(obj["eps_v"], "eps_v");
  if (obj.contains("eps_r"))
    seg.eps_r = rd.compliance(obj["eps_r"], "eps_r");
  if (obj.contains("g_v"))
    seg.g_v = rd.load(obj["g_v"], "g_v");
  if (obj.contains("g_r"))
    seg.g_r = rd.load(obj["g_r"], "g_r");
}

void read_corner(const ConfigReader& rd, const json& obj, CornerCondition& c) {
  rd.check_keys(obj, {"eps_c", "g_c"}, "corners");
  if (obj.contains("eps_c"))
    c.eps_c = rd.compliance(obj["eps_c"], "eps_c");
  if (obj.contains("g_c"))
    c.g_c = rd.number(obj["g_c"], "g_c");
}

template <class T, class F>
void read_list(const ConfigReader& rd, const json& v, const std::string& key, std::vector<T>& items, F&& read_one) {
  if (v.is_object()) {
    for (auto& item : items)
      read_one(rd, v, item);
  } else if (v.is_array()) {
    if (v.size() != items.size())
      rd.fail(key, "expected " + std::to_string(items.size()) + " entries, got " + std::to_string(v.size()));
    for (std::size_t i = 0; i < items.size(); ++i)
      read_one(rd, v[i], items[i]);
  } else {
    rd.fail(key, "expected an object or an array");
  }
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what(), line_at(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  const ConfigReader rd(text);
  rd.check_keys(doc,
                {"geometry", "material", "load", "preset", "segments", "corners", "gamma", "method", "refinement",
                 "indicator", "exact", "outputs"},
                "");

  ExperimentConfig cfg;
  if (doc.contains("geometry")) {
    rd.check_keys(doc["geometry"], {"n"}, "geometry");
    if (doc["geometry"].contains("n"))
      cfg.n = rd.integer(doc["geometry"]["n"], "n", 1);
  }
  if (doc.contains("material")) {
    const json& m = doc["material"];
    rd.check_keys(m, {"E", "nu", "d"}, "material");
    const double e = m.contains("E") ? rd.number(m["E"], "E") : cfg.material.young;
    const double nu = m.contains("nu") ? rd.number(m["nu"], "nu") : cfg.material.poisson;
    const double d = m.contains("d") ? rd.number(m["d"], "d") : cfg.material.thickness;
    try {
      cfg.material = Material::make(e, nu, d);
    } catch (const InvalidArgument& ex) {
      rd.fail("material", ex.what());
    }
  }
  if (doc.contains("load"))
    cfg.load = rd.load(doc["load"], "load");

  std::string preset = "clamped";
  if (doc.contains("preset"))
    preset = rd.string(doc["preset"], "preset");
  try {
    cfg.boundary = BoundarySpec::preset(4, preset);
  } catch (const InvalidArgument& e) {
    rd.fail("preset", e.what());
  }
  if (doc.contains("segments"))
    read_list(rd, doc["segments"], "segments", cfg.boundary.segments, read_segment);
  if (doc.contains("corners"))
    read_list(rd, doc["corners"], "corners", cfg.boundary.corners, read_corner);

  if (doc.contains("gamma")) {
    cfg.gamma = rd.number(doc["gamma"], "gamma");
    if (cfg.gamma <= 0.0)
      rd.fail("gamma", "must be positive");
  }
  if (doc.contains("method")) {
    try {
      cfg.method = parse_method(rd.string(doc["method"], "method"));
    } catch (const InvalidArgument& e) {
      rd.fail("method", e.what());
    }
  }
  if (doc.contains("refinement")) {
    const json& r = doc["refinement"];
    rd.check_keys(r, {"type", "levels", "iterations", "theta"}, "refinement");
    const std::string type = r.contains("type") ? rd.string(r["type"], "type") : "uniform";
    if (type == "adaptive")
      cfg.adaptive = true;
    else if (type != "uniform")
      rd.fail("type", "expected \"uniform\" or \"adaptive\"");
    if (r.contains("levels"))
      cfg.levels = rd.integer(r["levels"], "levels", 1);
    if (r.contains("iterations"))
      cfg.iterations = rd.integer(r["iterations"], "iterations", 1);
    if (r.contains("theta")) {
      cfg.theta = rd.number(r["theta"], "theta");
      if (!(cfg.theta > 0.0 && cfg.theta <= 1.0))
        rd.fail("theta", "must lie in (0, 1]");
    }
  }
  if (doc.contains("indicator")) {
    try {
      cfg.indicator = parse_variant(rd.string(doc["indicator"], "indicator"));
    } catch (const InvalidArgument& e) {
      rd.fail("indicator", e.what());
    }
  }
  if (doc.contains("exact")) {
    const std::string name = rd.string(doc["exact"], "exact");
    if (name != "clamped-benchmark")
      rd.fail("exact", "only \"clamped-benchmark\" is known");
    const ClampedBenchmark b = clamped_benchmark();
    if (doc.contains("material") && (cfg.material.young != b.material.young ||
                                     cfg.material.poisson != b.material.poisson ||
                                     cfg.material.thickness != b.material.thickness))
      rd.fail("exact", "the benchmark fixes E = 1, nu = 0.3, d = 1");
    if (!cfg.boundary.all_clamped())
      rd.fail("exact", "the benchmark solution belongs to the clamped plate");
    cfg.material = b.material;
    cfg.exact = b.exact;
    if (!doc.contains("load"))
      cfg.load = b.load;
  }
  if (doc.contains("outputs")) {
    rd.check_keys(doc["outputs"], {"dir"}, "outputs");
    if (doc["outputs"].contains("dir"))
      cfg.output_dir = rd.string(doc["outputs"]["dir"], "dir");
  }

  const Mesh mesh = build_unit_square_mesh(cfg.n);
  try {
    cfg.boundary.validate(mesh);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("boundary conditions: ") + e.what(), line_of_key(text, "segments"));
  }
  if (cfg.method == Method::classical_eliminate && !cfg.boundary.all_clamped())
    rd.fail("method", "classical-eliminate needs a fully clamped plate");
  if (cfg.method == Method::classical_weak)
    for (const auto& s : cfg.boundary.segments)
      if (s.eps_v.is_zero() || s.eps_r.is_zero())
        rd.fail("method", "classical-weak needs positive compliances");
  if (cfg.indicator && !indicator_fits(cfg.boundary, *cfg.indicator))
    rd.fail("indicator", to_string(*cfg.indicator) + " does not match the boundary conditions");
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config file " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str());
}

// --- experiment 1 ---------------------------------------------------------------

Ex1Result run_ex1(const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const int levels = options.levels.value_or(4);
  const double gamma = options.gamma.value_or(1e-3);
  const int n0 = 4;
  const ClampedBenchmark b = clamped_benchmark();

  ProblemSetup s;
  s.initial_mesh = build_unit_square_mesh(n0);
  s.problem = {b.material, b.load, BoundarySpec::preset(4, "clamped"), b.exact};
  s.gamma = gamma;
  s.variant = IndicatorVariant::ex1;
  s.seed = seed_name(n0);
  apply_execution(s, options.execution);

  const ConvergenceHistory nitsche = run_uniform(s, levels);
  s.method = Method::classical_eliminate;
  const ConvergenceHistory classical = run_uniform(s, levels);

  Ex1Result r;
  for (int l = 0; l < levels; ++l) {
    const IterationRecord& a = nitsche.rows[l];
    r.h.push_back(a.h);
    r.dofs.push_back(a.dofs);
    r.u_nitsche.push_back(*a.u_probe);
    r.u_classical.push_back(*classical.rows[l].u_probe);
    r.err.push_back(*a.err);
    r.eta.push_back(a.eta);
    r.eta_ek.push_back(a.eta_ek);
    r.err_classical.push_back(*classical.rows[l].err);
  }
  r.seconds = seconds_since(start);

  if (options.write_files) {
    const fs::path dir = options.out.value_or(fs::path("out") / "ex1");
    const std::string comment = "# gamma=" + format_double(gamma) + " method=nitsche,classical-eliminate seed=" +
                                seed_name(n0) + "\n";
    {
      std::ofstream out = open_output(dir / "ex1_pointwise.csv");
      out << comment << "h,nitsche,classical\n";
      for (int l = 0; l < levels; ++l)
        out << r.h[l] << ',' << r.u_nitsche[l] << ',' << r.u_classical[l] << '\n';
    }
    {
      std::ofstream out = open_output(dir / "ex1_convergence.csv");
      out << comment << "h,err,rate,eta,rate,N,eta_ek,err_classical\n";
      for (int l = 0; l < levels; ++l) {
        out << r.h[l] << ',' << r.err[l] << ',';
        if (l > 0)
          out << rate(r.err[l - 1], r.err[l], r.h[l - 1], r.h[l]);
        out << ',' << r.eta[l] << ',';
        if (l > 0)
          out << rate(r.eta[l - 1], r.eta[l], r.h[l - 1], r.h[l]);
        out << ',' << r.dofs[l] << ',' << r.eta_ek[l] << ',' << r.err_classical[l] << '\n';
      }
    }
  }
  return r;
}

// --- experiment 2 ---------------------------------------------------------------

Ex2Result run_ex2(const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const int levels = options.levels.value_or(4);
  const int iterations = 10;
  const double theta = options.theta.value_or(0.5);
  const ExtReal inf = ExtReal::infinity();

  ProblemSetup s;
  s.initial_mesh = build_unit_square_mesh(kEx2InitialN);
  s.problem = {Material::make(1.0, 0.3, 1.0), constant_load(1.0),
               BoundarySpec::uniform(4, {inf, inf, constant_load(0.0), constant_load(0.0)}, {ExtReal(0.0), 0.0}),
               std::nullopt};
  s.gamma = options.gamma.value_or(1e-3);
  s.variant = IndicatorVariant::ex2;
  s.seed = seed_name(kEx2InitialN);
  apply_execution(s, options.execution);

  const fs::path dir = options.out.value_or(fs::path("out") / "ex2");
  Ex2Result r;
  r.uniform = run_uniform(s, levels);
  r.adaptive = run_adaptive(s, iterations, theta, [&](int it, const Mesh& mesh, const LevelResult& lr) {
    if (options.write_files && it < 4)
      write_mesh_file(dir / ("mesh_adaptive_iter" + std::to_string(it) + ".txt"), mesh);
    if (it + 1 == iterations) {
      double umax = 0.0, cmax = 0.0;
      for (int v = 0; v < mesh.num_vertices(); ++v)
        umax = std::max(umax, std::abs(lr.solution.coefficients[6 * v]));
      for (const CornerData& c : lr.report.corners)
        cmax = std::max(cmax, std::abs(c.value));
      r.corner_ratio = umax > 0.0 ? cmax / umax : 0.0;
    }
  });
  r.uniform_slope = slope_of_tail(r.uniform, r.uniform.rows.size());
  r.adaptive_slope = slope_of_tail(r.adaptive, 5);
  r.seconds = seconds_since(start);

  if (options.write_files) {
    std::ofstream u = open_output(dir / "ex2_uniform.csv");
    r.uniform.write_csv(u);
    std::ofstream a = open_output(dir / "ex2_adaptive.csv");
    r.adaptive.write_csv(a);
  }
  return r;
}

// --- experiment 3 ---------------------------------------------------------------

int count_strip(const Mesh& mesh, double y0, double half_width) {
  int count = 0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double lo = mesh.vertex(mesh.triangle(t)[0]).y(), hi = lo;
    for (int v : mesh.triangle(t)) {
      lo = std::min(lo, mesh.vertex(v).y());
      hi = std::max(hi, mesh.vertex(v).y());
    }
    if (hi > y0 - half_width && lo < y0 + half_width)
      ++count;
  }
  return count;
}

const StripRow& Ex3Result::find(double eps_r, Method method, int iter) const {
  for (const StripRow& row : rows)
    if (row.eps_r == eps_r && row.method == method && row.iter == iter)
      return row;
  throw InvalidArgument("no strip row for the requested run");
}

int Ex3Result::last_iter() const {
  int k = 0;
  for (const StripRow& row : rows)
    k = std::max(k, row.iter);
  return k;
}

Ex3Result run_ex3(const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const int refinements = options.levels.value_or(5);
  const double theta = options.theta.value_or(0.5);
  const double gamma = options.gamma.value_or(1e-3);
  const fs::path dir = options.out.value_or(fs::path("out") / "ex3");

  Ex3Result r;
  for (double eps_r : {1.0, 1e-2, 1e-4, 1e-6}) {
    for (Method method : {Method::nitsche, Method::classical_weak}) {
      ProblemSetup s;
      s.initial_mesh = build_unit_square_mesh(kEx3InitialN);
      const SegmentCondition seg{ExtReal(1.0), ExtReal(eps_r), step_load('y', 0.75, 1.0, 0.0),
                                 step_load('y', 0.25, 10.0, 0.0)};
      s.problem = {Material::make(1.0, 0.0, 1.0), constant_load(0.0),
                   BoundarySpec::uniform(4, seg, {ExtReal::infinity(), 0.0}), std::nullopt};
      s.method = method;
      s.gamma = gamma;
      s.variant = method == Method::nitsche ? IndicatorVariant::ex3_nitsche : IndicatorVariant::ex3_classical;
      s.seed = seed_name(kEx3InitialN);
      apply_execution(s, options.execution);

      const std::string tag = to_string(method) + "_epsr" + format_double(eps_r);
      const ConvergenceHistory hist =
          run_adaptive(s, refinements + 1, theta, [&](int it, const Mesh& mesh, const LevelResult&) {
            r.rows.push_back({eps_r, method, it, mesh.num_triangles(), count_strip(mesh, 0.25, 0.05),
                              count_strip(mesh, 0.75, 0.05)});
            if (options.write_files)
              write_mesh_file(dir / ("mesh_" + tag + "_iter" + std::to_string(it) + ".txt"), mesh);
          });
      if (options.write_files) {
        std::ofstream out = open_output(dir / ("ex3_history_" + tag + ".csv"));
        hist.write_csv(out);
      }
    }
  }
  r.seconds = seconds_since(start);

  if (options.write_files) {
    std::ofstream out = open_output(dir / "ex3_strips.csv");
    out << "# gamma=" << format_double(gamma) << " method=nitsche,classical-weak seed=" << seed_name(kEx3InitialN)
        << " theta=" << theta << '\n';
    out << "eps_r,method,iter,elements,strip_lower,strip_upper,share_lower,share_upper\n";
    for (const StripRow& row : r.rows)
      out << row.eps_r << ',' << to_string(row.method) << ',' << row.iter << ',' << row.elements << ','
          << row.lower << ',' << row.upper << ',' << double(row.lower) / row.elements << ','
          << double(row.upper) / row.elements << '\n';
  }
  return r;
}

// --- custom runs ----------------------------------------------------------------

RunSummary run_config(const ExperimentConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ProblemSetup s;
  s.initial_mesh = build_unit_square_mesh(config.n);
  s.problem = {config.material, config.load, config.boundary, config.exact};
  s.method = config.method;
  s.gamma = options.gamma.value_or(config.gamma);
  s.variant = config.indicator.value_or(default_variant(config.boundary, config.method));
  s.seed = seed_name(config.n);
  apply_execution(s, options.execution);

  const fs::path dir = options.out.value_or(config.output_dir);
  std::optional<EstimatorReport> last_report;
  std::vector<double> level_seconds;
  const LevelObserver observer = [&](int it, const Mesh& mesh, const LevelResult& lr) {
    if (options.write_files)
      write_mesh_file(dir / "meshes" / ("level" + std::to_string(it) + ".txt"), mesh);
    last_report = lr.report;
    level_seconds.push_back(lr.seconds);
  };

  RunSummary summary;
  summary.indicator = s.variant;
  if (config.adaptive)
    summary.history = run_adaptive(s, options.levels.value_or(config.iterations),
                                   options.theta.value_or(config.theta), observer);
  else
    summary.history = run_uniform(s, options.levels.value_or(config.levels), observer);
  summary.seconds = seconds_since(start);

  if (options.write_files) {
    const std::string comment = "gamma=" + format_double(s.gamma) + " method=" + to_string(s.method) +
                                " seed=" + s.seed;
    {
      std::ofstream out = open_output(dir / "history.csv");
      summary.history.write_csv(out);
    }
    {
      std::ofstream out = open_output(dir / "estimator.csv");
      write_estimator_csv(out, *last_report, comment);
    }
    const IterationRecord& last = summary.history.rows.back();
    json j;
    j["N"] = last.dofs;
    j["elements"] = last.elements;
    j["h"] = last.h;
    j["eta_h"] = last.eta;
    j["eta_ek"] = last.eta_ek;
    if (last.err)
      j["error"] = *last.err;
    if (last.u_probe)
      j["u_mid"] = *last.u_probe;
    j["gamma"] = s.gamma;
    j["method"] = to_string(s.method);
    j["indicator"] = to_string(s.variant);
    j["refinement"] = config.adaptive ? "adaptive" : "uniform";
    if (summary.history.theta)
      j["theta"] = *summary.history.theta;
    j["levels"] = summary.history.rows.size();
    j["seconds_total"] = summary.seconds;
    j["seconds_per_level"] = level_seconds;
    std::ofstream out = open_output(dir / "summary.json");
    out << j.dump(2) << '\n';
  }
  return summary;
}

} // namespace plate

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "plate/adaptive.hpp"
#include "plate/parallel.hpp"
#include "plate/plate_model.hpp"

namespace plate {

/// A custom run read from a JSON document.
///
///   {
///     "geometry": {"n": 4},
///     "material": {"E": 1, "nu": 0.3, "d": 1},
///     "load": "constant:1",
///     "preset": "free",
///     "segments": [{"eps_v": "inf", "eps_r": 0, "g_v": "zero", "g_r": "step:y:0.5:1:0"}, ...],
///     "corners": {"eps_c": 0, "g_c": 0},
///     "gamma": 1e-3,
///     "method": "nitsche",
///     "refinement": {"type": "adaptive", "iterations": 10, "theta": 0.5},
///     "indicator": "ex2",
///     "exact": "clamped-benchmark",
///     "outputs": {"dir": "out/run"}
///   }
///
/// "segments" and "corners" take either one object (applied everywhere) or one
/// object per segment/corner; their fields override the preset. Compliances are
/// nonnegative numbers or "inf".
struct ExperimentConfig {
  int n = 4;
  Material material = Material::make(1.0, 0.3, 1.0);
  LoadFunction load = constant_load(0.0);
  BoundarySpec boundary;
  std::optional<ExactSolution> exact;
  double gamma = 1e-3;
  Method method = Method::nitsche;
  bool adaptive = false;
  int levels = 4;      // uniform
  int iterations = 10; // adaptive
  double theta = 0.5;
  std::optional<IndicatorVariant> indicator; // chosen from the boundary data when empty
  std::filesystem::path output_dir = "out/run";
};

/// Throws ConfigError with the offending line where it can be located.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Command-line overrides shared by all experiments.
struct RunOptions {
  std::optional<double> gamma;
  std::optional<int> levels; // uniform levels, or adaptive iterations where only adaptive runs exist
  std::optional<double> theta;
  std::optional<std::filesystem::path> out;
  Execution execution = Execution::parallel;
  bool write_files = true;
};

struct Ex1Result {
  std::vector<double> h;
  std::vector<int> dofs;
  std::vector<double> u_nitsche, u_classical;
  std::vector<double> err, eta, eta_ek; // Nitsche
  std::vector<double> err_classical;
  double seconds = 0.0;
};

/// Clamped benchmark on n = 4, 8, 16, 32 with Nitsche and eliminated clamping.
Ex1Result run_ex1(const RunOptions& options = {});

struct Ex2Result {
  ConvergenceHistory uniform, adaptive;
  double uniform_slope = 0.0;
  double adaptive_slope = 0.0; // eta_h against N over the last five iterations
  double corner_ratio = 0.0;   // max |u_h(c_i)| / max |u_h| on the final adaptive mesh
  double seconds = 0.0;
};

/// Plate supported only at the corners: uniform and adaptive histories.
Ex2Result run_ex2(const RunOptions& options = {});

struct StripRow {
  double eps_r = 0.0;
  Method method = Method::nitsche;
  int iter = 0;
  int elements = 0;
  int lower = 0; // elements meeting |y - 1/4| < 0.05
  int upper = 0; // elements meeting |y - 3/4| < 0.05
};

struct Ex3Result {
  std::vector<StripRow> rows;
  double seconds = 0.0;

  const StripRow& find(double eps_r, Method method, int iter) const;
  int last_iter() const;
};

/// Step boundary loads, eps^r in {1, 1e-2, 1e-4, 1e-6}, Nitsche against classical weak.
Ex3Result run_ex3(const RunOptions& options = {});

/// Elements whose closure meets the open strip |y - y0| < half_width.
int count_strip(const Mesh& mesh, double y0, double half_width);

struct RunSummary {
  ConvergenceHistory history;
  IndicatorVariant indicator = IndicatorVariant::weighted;
  double seconds = 0.0;
};

/// Runs a config: history CSV, estimator CSV of the final level, meshes and summary.json.
RunSummary run_config(const ExperimentConfig& config, const RunOptions& options = {});

/// Initial meshes of the experiments.
inline constexpr int kEx2InitialN = 4;
inline constexpr int kEx3InitialN = 6;

} // namespace plate

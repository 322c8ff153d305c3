#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "plate/errors.hpp"
#include "plate/experiments.hpp"
#include "plate/parallel.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverFailure = 3;

int threads_from_env(int fallback) {
  const char* env = std::getenv("PLATE_THREADS");
  if (!env || !*env)
    return fallback;
  try {
    std::size_t used = 0;
    const int n = std::stoi(env, &used);
    if (used != std::string(env).size() || n < 1)
      throw std::invalid_argument(env);
    return n;
  } catch (const std::exception&) {
    throw plate::ConfigError(std::string("PLATE_THREADS must be a positive integer, got '") + env + "'");
  }
}

void print_history(const plate::ConvergenceHistory& h) {
  std::cout << "  iter        N          h        eta_h\n";
  for (const auto& r : h.rows)
    std::cout << "  " << std::setw(4) << r.iter << ' ' << std::setw(8) << r.dofs << ' ' << std::setw(10)
              << std::setprecision(4) << r.h << ' ' << std::setw(12) << std::setprecision(5) << r.eta << '\n';
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kirchhoff plate solver with Nitsche boundary conditions and Argyris elements"};
  app.require_subcommand(1);

  std::optional<double> gamma, theta;
  std::optional<int> levels;
  std::optional<std::string> out;
  int threads = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--gamma", gamma, "Nitsche stabilization parameter")->check(CLI::PositiveNumber);
    sub->add_option("--levels", levels, "uniform levels (ex3: adaptive refinements; run: either)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--theta", theta, "Dorfler bulk fraction in (0, 1]")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "OpenMP threads (PLATE_THREADS overrides)")->check(CLI::NonNegativeNumber);
  };
  CLI::App* ex1 = app.add_subcommand("ex1", "clamped benchmark on four dyadic meshes");
  CLI::App* ex2 = app.add_subcommand("ex2", "plate supported at the corners, uniform and adaptive");
  CLI::App* ex3 = app.add_subcommand("ex3", "step boundary loads, Nitsche against classical weak");
  CLI::App* run = app.add_subcommand("run", "run a JSON config");
  std::string config_path;
  run->add_option("config", config_path, "config file")->required();
  for (CLI::App* sub : {ex1, ex2, ex3, run})
    add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    plate::set_num_threads(threads_from_env(threads));
    if (theta && *theta <= 0.0)
      throw plate::ConfigError("--theta must lie in (0, 1]");

    plate::RunOptions opts;
    opts.gamma = gamma;
    opts.levels = levels;
    opts.theta = theta;
    if (out)
      opts.out = *out;

    std::cout << std::setprecision(10);
    if (ex1->parsed()) {
      const plate::Ex1Result r = plate::run_ex1(opts);
      std::cout << "ex1: h, u_h(1/2,1/2) nitsche, classical, error, eta_h\n";
      for (std::size_t l = 0; l < r.h.size(); ++l)
        std::cout << "  " << r.h[l] << "  " << r.u_nitsche[l] << "  " << r.u_classical[l] << "  " << r.err[l]
                  << "  " << r.eta[l] << '\n';
      std::cout << "time " << r.seconds << " s\n";
    } else if (ex2->parsed()) {
      const plate::Ex2Result r = plate::run_ex2(opts);
      std::cout << "ex2 uniform:\n";
      print_history(r.uniform);
      std::cout << "ex2 adaptive:\n";
      print_history(r.adaptive);
      std::cout << std::setprecision(4) << "slopes: uniform " << r.uniform_slope << ", adaptive (last 5) "
                << r.adaptive_slope << "; corner deflection / max deflection " << r.corner_ratio << "\ntime "
                << r.seconds << " s\n";
    } else if (ex3->parsed()) {
      const plate::Ex3Result r = plate::run_ex3(opts);
      std::cout << "ex3 strip counts after " << r.last_iter() << " refinements (lower y=1/4, upper y=3/4):\n";
      for (const auto& row : r.rows)
        if (row.iter == r.last_iter())
          std::cout << "  eps_r=" << row.eps_r << ' ' << plate::to_string(row.method) << ": elements "
                    << row.elements << ", lower " << row.lower << ", upper " << row.upper << '\n';
      std::cout << "time " << r.seconds << " s\n";
    } else {
      const plate::ExperimentConfig cfg = plate::load_config(config_path);
      const plate::RunSummary s = plate::run_config(cfg, opts);
      std::cout << "indicator " << plate::to_string(s.indicator) << '\n';
      print_history(s.history);
      std::cout << "time " << s.seconds << " s\n";
    }
  } catch (const plate::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const plate::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kConfigError;
  } catch (const plate::UnsupportedConfiguration& e) {
    std::cerr << "unsupported configuration: " << e.what() << '\n';
    return kConfigError;
  } catch (const plate::NotPositiveDefinite& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const plate::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}

#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "desslab/report.hpp"
#include "desslab/riccati.hpp"
#include "desslab/ring.hpp"

namespace desslab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExitCode : int { Ok = 0, ConfigError = 2, SolverMaxIter = 3 };

struct ExperimentParams {
  int n = 5;
  double a = 1.856;
  int q = 1;
  SensorMode mode = SensorMode::Diverse;
  std::vector<int> d{3};
  int T = 20;
  int node = 1;  // 1-based
  bool open_loop = false;
  std::vector<int> n_list;
  std::vector<double> a_grid;
  double bisect_tol = 1e-6;
  std::vector<SensorMode> modes{SensorMode::SlowOnly, SensorMode::Diverse};
  double eps_u = 1e-6;
  double eps_v = 1e-6;
};

struct ExperimentConfig {
  std::string experiment;
  ExperimentParams params;
  std::filesystem::path out_dir;  // not serialized
  std::vector<std::string> formats{"csv", "json", "svg"};
  DareOptions solver;

  bool wants(const std::string& format) const;
};

/// Experiments: impulse, synth, sweep-a, sweep-delay, breakpoint, ablate, ofsynth.
const std::vector<std::string>& experiment_names();

/// Validates and normalizes a config document. Throws ConfigError.
/// Range strings are accepted: d as "1..8" or "1,3,5", a_grid as
/// "start:stop:step", n_list like d.
ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Normalized document with every parameter the experiment reads. The output
/// directory is left out so the copy is identical wherever it is written.
Json config_to_json(const ExperimentConfig& config);

std::vector<int> parse_int_range(const std::string& text);
std::vector<double> parse_grid(const std::string& text);

/// $DESSLAB_OUT, else "desslab_out".
std::filesystem::path default_out_dir();

/// Runs the experiment, writes config.json plus the requested artifacts, and
/// returns the process exit status. Divergence is data, not an error.
int run_experiment(const ExperimentConfig& config, int workers, std::ostream& log);

}  // namespace desslab

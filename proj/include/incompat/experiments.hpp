#ifndef INCOMPAT_EXPERIMENTS_HPP
#define INCOMPAT_EXPERIMENTS_HPP

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "incompat/core.hpp"

namespace incompat {

/// Configuration of one registered Monte-Carlo experiment. Pass/fail
/// thresholds live in `targets`, never in code; the shipped files under
/// configs/ encode the acceptance values.
struct ExperimentConfig {
  std::string experiment;
  std::vector<Eigen::Index> dims;
  int g = 2;
  int k = 2;
  std::vector<double> alphas;  // subspace trace ratios where applicable
  std::vector<double> t_grid;
  std::vector<double> c_grid;  // induced-POVM ancilla ratios
  std::vector<int> p_grid;     // moment orders
  int trials = 1;
  int samples = 0;  // per-trial Monte-Carlo sample count where applicable
  std::uint64_t seed = 0;
  std::string output_path;  // prefix for <path>.csv and <path>.json; may be empty
  int workers = 0;          // 0: INCOMPAT_WORKERS env var, then hardware
  nlohmann::json targets;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

/// Per-trial records plus aggregates and the verdict against the configured
/// targets. Identical config + seed give byte-identical CSV output and
/// identical JSON up to the wall-clock field.
struct ExperimentReport {
  std::string experiment;
  nlohmann::json config_echo;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_errors;  // nonempty entries mark excluded rows
  nlohmann::json aggregates;
  bool passed = false;
  std::vector<std::string> failures;
  int excluded_trials = 0;
  double wall_clock_s = 0.0;

  std::string csv() const;
  nlohmann::json to_json() const;
};

/// Runs one registered experiment:
///   two_proj_disc, two_proj_unbalanced, many_proj_witness, two_bases,
///   many_bases, induced_povm, moments, kesten_mckay.
/// Writes <output_path>.csv / .json when an output path is configured.
ExperimentReport run_experiment(const ExperimentConfig& config);

std::vector<std::string> registered_experiments();

}  // namespace incompat

#endif

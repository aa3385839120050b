#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mollify/auc.hpp"
#include "mollify/optimizer.hpp"

namespace mollify {

/// One experiment, as written in a config file. Sections [objective],
/// [smoother], [schedules], [run]; flat key = value lines; '#' or ';'
/// start a comment line. Exactly one of descriptor/dataset must be set.
/// target_ess, record_every, threads, and summary are optional; everything
/// else is mandatory. Serialization round-trips losslessly (floats keep 17
/// significant digits).
struct ExperimentConfig {
  std::optional<std::string> descriptor;
  std::optional<std::string> dataset;
  std::optional<int> n_batch;

  std::string smoother_kind;  // "mean" or "exp"
  std::optional<double> target_ess;

  double c_beta = 0.0;
  double iota = 0.0;
  double c_gamma = 0.0;
  double kappa = 0.0;

  std::vector<double> theta0;
  long n_iterations = 0;
  int n_samples = 0;
  std::uint64_t master_seed = 0;
  long record_every = 10;
  int threads = 1;
  std::string output;
  std::optional<std::string> summary;

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

SmootherKind parse_smoother(const std::string& kind);

/// A config resolved into runnable pieces. The dataset is retained for
/// AUC runs so the summary can report the final empirical risk.
struct Experiment {
  NoisyObjective objective;
  Point theta0;
  RunConfig run;
  std::optional<Dataset> data;
};

Experiment build_experiment(const ExperimentConfig& config);

}  // namespace mollify

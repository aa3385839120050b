#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "mollify/objective.hpp"
#include "mollify/schedule.hpp"
#include "mollify/smoothers.hpp"

namespace mollify {

struct RunConfig {
  Schedule beta;
  Schedule gamma;
  SmootherKind smoother = SmootherKind::MeanSmooth;
  long n_iterations = 100;
  int n_samples = 1024;
  std::optional<double> target_ess;
  std::uint64_t master_seed = 0;
  long record_every = 10;
  int n_threads = 1;  // 0 = one per hardware core

  RunConfig(Schedule beta_schedule, Schedule gamma_schedule)
      : beta(beta_schedule), gamma(gamma_schedule) {}

  void validate() const;
};

/// One recorded iteration: the state theta_n the estimate was taken at,
/// the schedule values used, and the estimator diagnostics.
struct TraceRecord {
  long n = 0;
  Point theta;
  double beta_n = 0.0;
  double gamma_n = 0.0;
  double grad_norm = 0.0;
  double value = 0.0;
  double ess = 0.0;
  double rescale_lambda = 1.0;
};

struct RunTrace {
  std::vector<TraceRecord> records;
  Point final_theta;
  double running_min_grad_norm = std::numeric_limits<double>::infinity();
};

/// theta - beta_n * grad, coordinate-wise.
Point step(std::span<const double> theta, double beta_n,
           std::span<const double> grad);

/// Iteration n is recorded when n == 1, n == n_iterations, or
/// record_every divides n.
bool should_record(long n, long n_iterations, long record_every);
long expected_record_count(long n_iterations, long record_every);

/// The descent recursion theta_{n+1} = theta_n - beta_n * grad_n for
/// n = 1..n_iterations, with noise drawn from stream (seed, noise, n) and
/// Monte-Carlo samples from streams (seed, mc, n, k). A deterministic
/// function of (obj, theta0, config) for every thread count. When the
/// smoother is the exponential one and beta_n equals gamma_n exactly, the
/// update is the direct posterior-mean assignment, which the plain step
/// formula only matches up to rounding.
RunTrace run(const NoisyObjective& obj, const Point& theta0,
             const RunConfig& config);

/// Standalone posterior-mean recursion theta_{n+1} = sum_k w_k x_k used as
/// the equivalence reference for run with beta == gamma: same substreams,
/// same accumulation order, bit-identical traces.
RunTrace moment_match_run(const NoisyObjective& obj, const Point& theta0,
                          const Schedule& gamma, long n_iterations,
                          int n_samples, std::uint64_t master_seed,
                          long record_every = 10, int n_threads = 1);

}  // namespace mollify

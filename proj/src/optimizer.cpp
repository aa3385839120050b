#include "mollify/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mollify {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

[[noreturn]] void rethrow_with_iteration(long n) {
  const std::string where = "iteration " + std::to_string(n) + ": ";
  try {
    throw;
  } catch (const EvaluationError& e) {
    throw EvaluationError(where + e.what());
  } catch (const DegenerateWeightsError& e) {
    throw DegenerateWeightsError(where + e.what());
  } catch (const InfeasibleTargetError& e) {
    throw InfeasibleTargetError(where + e.what());
  } catch (const Error& e) {
    throw Error(where + e.what());
  }
}

void finalize(RunTrace& trace) {
  for (const TraceRecord& r : trace.records) {
    trace.running_min_grad_norm = std::min(trace.running_min_grad_norm, r.grad_norm);
  }
}

}  // namespace

void RunConfig::validate() const {
  if (n_iterations < 1) throw Error("n_iterations must be >= 1");
  if (n_samples < 2) throw Error("n_samples must be >= 2");
  if (record_every < 1) throw Error("record_every must be >= 1");
  if (n_threads < 0) throw Error("n_threads must be >= 0");
  if (target_ess &&
      (!(*target_ess > 1.0) || !(*target_ess < static_cast<double>(n_samples)))) {
    throw Error("target ESS must lie in (1, n_samples)");
  }
}

Point step(std::span<const double> theta, double beta_n,
           std::span<const double> grad) {
  if (theta.size() != grad.size()) {
    throw DimensionError("theta and gradient dimensions differ");
  }
  Point next(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    next[i] = theta[i] - beta_n * grad[i];
    if (!std::isfinite(next[i])) {
      throw EvaluationError("update produced a non-finite iterate");
    }
  }
  return next;
}

bool should_record(long n, long n_iterations, long record_every) {
  return n == 1 || n == n_iterations || n % record_every == 0;
}

long expected_record_count(long n_iterations, long record_every) {
  long count = 0;
  for (long n = 1; n <= n_iterations; ++n) {
    if (should_record(n, n_iterations, record_every)) ++count;
  }
  return count;
}

RunTrace run(const NoisyObjective& obj, const Point& theta0,
             const RunConfig& config) {
  config.validate();
  check_finite(theta0, "theta0");
  if (static_cast<int>(theta0.size()) != obj.dim) {
    throw DimensionError("theta0 dimension does not match the objective");
  }

  RunTrace trace;
  Point theta = theta0;
  for (long n = 1; n <= config.n_iterations; ++n) {
    const double beta_n = config.beta.value(n);
    const double gamma_n = config.gamma.value(n);
    RngStream noise_rng =
        substream(config.master_seed, StreamTag::kNoise, static_cast<std::uint64_t>(n));
    const Noise u = obj.draw_noise(noise_rng);
    const SampleStreams streams{config.master_seed, static_cast<std::uint64_t>(n)};

    GradEstimate est;
    try {
      if (config.smoother == SmootherKind::MeanSmooth) {
        est = grad_mean_smooth(obj, theta, gamma_n, u, config.n_samples, streams,
                               config.n_threads);
      } else {
        est = grad_exp_smooth(obj, theta, gamma_n, u, config.n_samples,
                              config.target_ess, streams, config.n_threads);
      }
    } catch (...) {
      rethrow_with_iteration(n);
    }

    if (should_record(n, config.n_iterations, config.record_every)) {
      trace.records.push_back({n, theta, beta_n, gamma_n, norm2(est.gradient),
                               est.value_estimate, est.ess, est.rescale_lambda});
    }

    if (config.smoother == SmootherKind::ExpSmooth && beta_n == gamma_n) {
      theta = est.posterior_mean;  // exact moment matching
    } else {
      theta = step(theta, beta_n, est.gradient);
    }
  }
  trace.final_theta = theta;
  finalize(trace);
  return trace;
}

RunTrace moment_match_run(const NoisyObjective& obj, const Point& theta0,
                          const Schedule& gamma, long n_iterations,
                          int n_samples, std::uint64_t master_seed,
                          long record_every, int n_threads) {
  if (n_iterations < 1) throw Error("n_iterations must be >= 1");
  check_finite(theta0, "theta0");
  if (static_cast<int>(theta0.size()) != obj.dim) {
    throw DimensionError("theta0 dimension does not match the objective");
  }
  const std::size_t d = theta0.size();
  const double n_real = static_cast<double>(n_samples);

  RunTrace trace;
  Point theta = theta0;
  for (long n = 1; n <= n_iterations; ++n) {
    const double gamma_n = gamma.value(n);
    const double rg = std::sqrt(gamma_n);
    RngStream noise_rng =
        substream(master_seed, StreamTag::kNoise, static_cast<std::uint64_t>(n));
    const Noise u = obj.draw_noise(noise_rng);
    const SampleStreams streams{master_seed, static_cast<std::uint64_t>(n)};

    Point mean(d, 0.0);
    double ess_value = 0.0;
    double value = 0.0;
    try {
      const SampleBatch batch =
          draw_batch(obj, theta, gamma_n, u, n_samples, streams, n_threads);
      const std::vector<double> w = normalized_weights(batch.losses, 1.0);

      double w_sq = 0.0;
      for (double v : w) w_sq += v * v;
      ess_value = 1.0 / w_sq;

      // Sample-major accumulation, matching the estimator loop bitwise.
      for (int k = 0; k < n_samples; ++k) {
        for (std::size_t i = 0; i < d; ++i) {
          mean[i] += w[k] * (theta[i] + rg * batch.z[k * d + i]);
        }
      }

      const double lo =
          *std::min_element(batch.losses.begin(), batch.losses.end());
      double acc = 0.0;
      for (int k = 0; k < n_samples; ++k) {
        acc += std::exp(-(batch.losses[k] - lo));
      }
      value = lo - std::log(acc / n_real);
    } catch (...) {
      rethrow_with_iteration(n);
    }

    if (should_record(n, n_iterations, record_every)) {
      Point grad(d);
      for (std::size_t i = 0; i < d; ++i) {
        grad[i] = (theta[i] - mean[i]) / gamma_n;
      }
      trace.records.push_back({n, theta, gamma_n, gamma_n, norm2(grad), value,
                               ess_value, 1.0});
    }
    theta = mean;
  }
  trace.final_theta = theta;
  finalize(trace);
  return trace;
}

}  // namespace mollify

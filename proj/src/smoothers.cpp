#include "mollify/smoothers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mollify/parallel.hpp"

namespace mollify {

SampleBatch draw_batch(const NoisyObjective& obj, std::span<const double> theta,
                       double gamma, const Noise& u, int n_samples,
                       const SampleStreams& streams, int n_threads) {
  if (!(gamma > 0.0)) throw Error("gamma must be positive");
  if (n_samples < 2) throw Error("n_samples must be at least 2");
  check_finite(theta, "theta");
  const std::size_t d = theta.size();
  const double rg = std::sqrt(gamma);

  SampleBatch batch;
  batch.z.resize(static_cast<std::size_t>(n_samples) * d);
  batch.losses.resize(n_samples);
  batch.base_loss = obj(theta, u);
  if (!std::isfinite(batch.base_loss)) {
    throw EvaluationError("objective '" + obj.descriptor +
                          "' returned a non-finite loss at theta");
  }

  // Each slot is written by exactly one index; results are independent of
  // the thread count because sample k owns stream (seed, mc, iter, k).
  parallel_for(static_cast<std::size_t>(n_samples), n_threads, [&](std::size_t k) {
    RngStream rng = streams.at(k);
    std::vector<double> x(d);
    double* zk = batch.z.data() + k * d;
    for (std::size_t i = 0; i < d; ++i) {
      zk[i] = rng.normal();
      x[i] = theta[i] + rg * zk[i];
    }
    const double loss = obj(x, u);
    if (!std::isfinite(loss)) {
      throw EvaluationError("objective '" + obj.descriptor +
                            "' returned a non-finite loss at a sample point");
    }
    batch.losses[k] = loss;
  });
  return batch;
}

GradEstimate grad_mean_smooth(const NoisyObjective& obj,
                              std::span<const double> theta, double gamma,
                              const Noise& u, int n_samples,
                              const SampleStreams& streams, int n_threads) {
  const SampleBatch batch =
      draw_batch(obj, theta, gamma, u, n_samples, streams, n_threads);
  const std::size_t d = theta.size();
  const double inv_rg = 1.0 / std::sqrt(gamma);
  const double n = static_cast<double>(n_samples);

  GradEstimate est;
  est.n_samples = n_samples;
  est.ess = n;
  est.gradient.assign(d, 0.0);
  est.std_error.assign(d, 0.0);

  double value = 0.0;
  for (int k = 0; k < n_samples; ++k) value += batch.losses[k];
  est.value_estimate = value / n;

  for (std::size_t i = 0; i < d; ++i) {
    double sum = 0.0;
    for (int k = 0; k < n_samples; ++k) {
      sum += (batch.losses[k] - batch.base_loss) * batch.z[k * d + i];
    }
    const double mean = inv_rg * sum / n;
    double ss = 0.0;
    for (int k = 0; k < n_samples; ++k) {
      const double t =
          inv_rg * (batch.losses[k] - batch.base_loss) * batch.z[k * d + i] - mean;
      ss += t * t;
    }
    est.gradient[i] = mean;
    est.std_error[i] = std::sqrt(ss / (n - 1.0) / n);
  }
  return est;
}

double smooth_value_mean(const NoisyObjective& obj, std::span<const double> theta,
                         double gamma, const Noise& u, int n_samples,
                         const SampleStreams& streams, int n_threads) {
  const SampleBatch batch =
      draw_batch(obj, theta, gamma, u, n_samples, streams, n_threads);
  double value = 0.0;
  for (double l : batch.losses) value += l;
  return value / static_cast<double>(n_samples);
}

double ess(std::span<const double> weights) {
  double sum = 0.0, sum_sq = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error("weights must be non-negative and finite");
    }
    sum += w;
    sum_sq += w * w;
  }
  if (!(sum > 0.0)) throw Error("at least one weight must be strictly positive");
  return sum * sum / sum_sq;
}

std::vector<double> normalized_weights(std::span<const double> losses,
                                       double lambda) {
  if (losses.empty()) throw Error("losses must be non-empty");
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  const double lo = *std::min_element(losses.begin(), losses.end());
  if (!std::isfinite(lo)) {
    throw DegenerateWeightsError("losses contain non-finite values");
  }
  std::vector<double> w(losses.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < losses.size(); ++k) {
    w[k] = std::exp(-lambda * (losses[k] - lo));
    sum += w[k];
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw DegenerateWeightsError("every importance weight underflowed");
  }
  for (double& v : w) v /= sum;
  return w;
}

namespace {

double ess_at_lambda(std::span<const double> losses, double min_loss,
                     double lambda) {
  double sum = 0.0, sum_sq = 0.0;
  for (double l : losses) {
    const double w = std::exp(-lambda * (l - min_loss));
    sum += w;
    sum_sq += w * w;
  }
  return sum * sum / sum_sq;
}

}  // namespace

double rescale_to_target_ess(std::span<const double> losses, double target_ess,
                             double tol) {
  const std::size_t n = losses.size();
  if (n < 2) throw Error("need at least 2 losses to rescale");
  if (!(tol > 0.0)) throw Error("tol must be positive");
  for (double l : losses) {
    if (!std::isfinite(l)) throw Error("losses must be finite");
  }
  const double lo = *std::min_element(losses.begin(), losses.end());
  const double hi = *std::max_element(losses.begin(), losses.end());
  if (lo == hi) return 1.0;  // ESS is constant in lambda; convention
  if (!(target_ess > 1.0) || !(target_ess < static_cast<double>(n))) {
    throw InfeasibleTargetError(
        "target ESS must lie strictly between 1 and the sample count");
  }

  // ESS(lambda) decreases from N (lambda -> 0) to the multiplicity of the
  // minimal loss (lambda -> inf); bisect on log2(lambda).
  double t_lo = -40.0, t_hi = 40.0;
  const double ess_lo = ess_at_lambda(losses, lo, std::exp2(t_lo));
  const double ess_hi = ess_at_lambda(losses, lo, std::exp2(t_hi));
  if (ess_lo < target_ess - tol) {
    throw InfeasibleTargetError("target ESS exceeds what vanishing rescaling reaches");
  }
  if (ess_hi > target_ess + tol) {
    throw InfeasibleTargetError(
        "target ESS is below the multiplicity of the minimal loss");
  }
  for (int it = 0; it < 60; ++it) {
    const double t_mid = 0.5 * (t_lo + t_hi);
    if (ess_at_lambda(losses, lo, std::exp2(t_mid)) > target_ess) {
      t_lo = t_mid;
    } else {
      t_hi = t_mid;
    }
  }
  const double lambda = std::exp2(0.5 * (t_lo + t_hi));
  if (std::abs(ess_at_lambda(losses, lo, lambda) - target_ess) > tol) {
    throw InfeasibleTargetError("bisection could not reach the target ESS");
  }
  return lambda;
}

GradEstimate grad_exp_smooth(const NoisyObjective& obj,
                             std::span<const double> theta, double gamma,
                             const Noise& u, int n_samples,
                             std::optional<double> target_ess,
                             const SampleStreams& streams, int n_threads) {
  if (target_ess &&
      (!(*target_ess > 1.0) || !(*target_ess < static_cast<double>(n_samples)))) {
    throw InfeasibleTargetError("target ESS must lie in (1, n_samples)");
  }
  const SampleBatch batch =
      draw_batch(obj, theta, gamma, u, n_samples, streams, n_threads);
  const std::size_t d = theta.size();
  const double rg = std::sqrt(gamma);
  const double n = static_cast<double>(n_samples);

  double lambda = 1.0;
  if (target_ess) {
    try {
      lambda = rescale_to_target_ess(batch.losses, *target_ess,
                                     std::max(1e-9, 1e-6 * *target_ess));
    } catch (const InfeasibleTargetError&) {
      // Discrete losses can tie at the minimum so heavily that every lambda
      // leaves the ESS above the target. Flat weights are then already
      // better conditioned than requested; keep lambda = 1 rather than fail.
      lambda = 1.0;
    }
  }
  const std::vector<double> w = normalized_weights(batch.losses, lambda);

  GradEstimate est;
  est.n_samples = n_samples;
  est.rescale_lambda = lambda;

  double w_sq = 0.0;
  for (double v : w) w_sq += v * v;
  est.ess = 1.0 / w_sq;

  // Posterior mean accumulated sample-major; the moment-matching recursion
  // reproduces this loop order exactly, so their equality is bitwise.
  est.posterior_mean.assign(d, 0.0);
  for (int k = 0; k < n_samples; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      est.posterior_mean[i] += w[k] * (theta[i] + rg * batch.z[k * d + i]);
    }
  }

  est.gradient.assign(d, 0.0);
  est.std_error.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    est.gradient[i] = (theta[i] - est.posterior_mean[i]) / gamma;
    double var = 0.0;
    for (int k = 0; k < n_samples; ++k) {
      const double dx =
          theta[i] + rg * batch.z[k * d + i] - est.posterior_mean[i];
      var += w[k] * w[k] * dx * dx;
    }
    est.std_error[i] = std::sqrt(var) / gamma;
  }

  // Reported value always uses lambda = 1: shift-stable -log mean exp(-loss).
  const double lo = *std::min_element(batch.losses.begin(), batch.losses.end());
  double acc = 0.0;
  for (int k = 0; k < n_samples; ++k) acc += std::exp(-(batch.losses[k] - lo));
  est.value_estimate = lo - std::log(acc / n);
  return est;
}

}  // namespace mollify

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mollify/objective.hpp"
#include "mollify/rng.hpp"

namespace mollify {

/// Addresses the Monte-Carlo substreams of one gradient estimate. Sample k
/// always draws from stream (master_seed, mc, iteration, k), so estimates
/// are identical for any parallelism degree and changing the sample count
/// never perturbs other streams.
struct SampleStreams {
  std::uint64_t master_seed = 0;
  std::uint64_t iteration = 1;

  RngStream at(std::size_t sample_index) const {
    return sample_stream(master_seed, StreamTag::kMonteCarlo, iteration,
                         sample_index);
  }
};

/// One Monte-Carlo gradient estimate with its diagnostics.
struct GradEstimate {
  std::vector<double> gradient;
  std::vector<double> std_error;      // per coordinate
  std::vector<double> posterior_mean; // exp smoothing only; empty otherwise
  double value_estimate = 0.0;
  double ess = 0.0;           // equals n_samples for mean smoothing
  double rescale_lambda = 1.0;
  int n_samples = 0;
};

/// Shared draw: standard-normal perturbations z_k (row-major, n_samples x d),
/// losses at theta + sqrt(gamma) z_k, and the loss at theta itself.
struct SampleBatch {
  std::vector<double> z;
  std::vector<double> losses;
  double base_loss = 0.0;
};

SampleBatch draw_batch(const NoisyObjective& obj, std::span<const double> theta,
                       double gamma, const Noise& u, int n_samples,
                       const SampleStreams& streams, int n_threads = 1);

/// Centered estimate of the smoothed-mean gradient:
/// (1/N) sum_k gamma^{-1/2} (l(theta + sqrt(gamma) z_k, u) - l(theta, u)) z_k.
/// Exactly zero on constant objectives for every draw, not just on average.
GradEstimate grad_mean_smooth(const NoisyObjective& obj,
                              std::span<const double> theta, double gamma,
                              const Noise& u, int n_samples,
                              const SampleStreams& streams, int n_threads = 1);

/// Self-normalized importance-sampling estimate of the entropic gradient
/// gamma^{-1} (theta - sum_k w_k x_k) with w_k proportional to
/// exp(-lambda l(x_k, u)). When target_ess is given, lambda is chosen so the
/// realized ESS hits the target; if ties at the minimal loss leave every
/// achievable ESS above the target, lambda stays 1 (the weights are already
/// flatter than asked for). The reported value_estimate always uses
/// lambda = 1 so traces stay comparable across iterations.
GradEstimate grad_exp_smooth(const NoisyObjective& obj,
                             std::span<const double> theta, double gamma,
                             const Noise& u, int n_samples,
                             std::optional<double> target_ess,
                             const SampleStreams& streams, int n_threads = 1);

/// Monte-Carlo mean of l(theta + sqrt(gamma) z_k, u).
double smooth_value_mean(const NoisyObjective& obj, std::span<const double> theta,
                         double gamma, const Noise& u, int n_samples,
                         const SampleStreams& streams, int n_threads = 1);

/// (sum w)^2 / sum w^2 for non-negative weights; lies in [1, N].
double ess(std::span<const double> weights);

/// Weights proportional to exp(-lambda * losses), normalized to sum 1.
/// Computed from min-shifted losses, so adding a constant to every loss
/// leaves the weights bit-identical whenever the shifted subtraction is
/// exact in floating point.
std::vector<double> normalized_weights(std::span<const double> losses,
                                       double lambda);

/// Finds lambda > 0 whose exp(-lambda * losses) weights have ESS within tol
/// of target_ess. ESS decreases monotonically in lambda from N toward the
/// multiplicity of the minimal loss; targets outside that range are
/// infeasible. All-equal losses return lambda = 1 by convention.
double rescale_to_target_ess(std::span<const double> losses, double target_ess,
                             double tol);

}  // namespace mollify

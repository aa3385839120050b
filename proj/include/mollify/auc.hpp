#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mollify/objective.hpp"

namespace mollify {

/// Labeled feature vectors with all +1 rows ordered first. The ordering is
/// an invariant enforced at construction, not a precondition on callers.
struct Dataset {
  std::vector<std::vector<double>> features;  // n_data rows in R^p
  std::vector<int> labels;                    // entries in {-1, +1}
  int n_plus = 0;

  int n_data() const { return static_cast<int>(features.size()); }
  int dim() const { return features.empty() ? 0 : static_cast<int>(features[0].size()); }
  int n_minus() const { return n_data() - n_plus; }
};

/// Reorders rows so positives come first and validates labels/shapes.
Dataset make_dataset(std::vector<std::vector<double>> features,
                     std::vector<int> labels);

/// Parses rows "label,feat_1,...,feat_p" with label in {-1, +1}; an
/// optional header line is auto-detected and skipped.
Dataset load_csv(const std::string& path);

/// Two spherical Gaussian blobs in R^p centered at +-center_scale/sqrt(p)
/// along the all-ones diagonal, labeled by blob.
Dataset make_blobs(int p, int n_data, std::uint64_t data_seed,
                   double center_scale = 2.0, double noise_sd = 0.5);

/// Index pairs (positive row, negative row); duplicates allowed.
struct PairBatch {
  std::vector<std::pair<int, int>> pairs;
};

/// Projection from the unit sphere minus the pole e_p onto R^{p-1}:
/// v -> (v_1, ..., v_{p-1}) / (1 - v_p).
Point stereographic(std::span<const double> v);

/// Inverse map theta -> (2 theta, ||theta||^2 - 1) / (||theta||^2 + 1);
/// always lands on the unit sphere and never on the pole itself.
Point stereographic_inverse(std::span<const double> theta);

/// Fraction of ordered positive-negative pairs the direction v misorders,
/// normalized by n(n-1). The indicator is strict, so ties count as ordered.
/// Sort-based, O(n log n).
double empirical_auc_risk(std::span<const double> v, const Dataset& data);

/// Mini-batch surrogate: maps theta to the sphere, counts strictly
/// misordered pairs in the batch, and scales by
/// 2 n_+ (n - n_+) / (n (n-1) n_batch).
double minibatch_auc_loss(std::span<const double> theta, const PairBatch& batch,
                          const Dataset& data);

/// n_batch uniform draws (with replacement) from positives x negatives.
PairBatch sample_batch(const Dataset& data, int n_batch, RngStream& rng);

/// The mini-batch loss as an optimizable objective over R^{p-1}; the noise
/// token carries the sampled PairBatch.
NoisyObjective auc_objective(const Dataset& data, int n_batch);

}  // namespace mollify

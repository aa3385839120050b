#pragma once

#include <string>
#include <vector>

#include "mollify/objective.hpp"

namespace mollify {

/// Named test objectives with declared regularity metadata. Covers both
/// Holder regimes (alpha = 1 smooth, alpha = 0 with jumps), a stochastic
/// member, and a piecewise-constant member.
std::vector<NoisyObjective> builtin_corpus();

/// Builds one corpus objective by descriptor. Descriptors: "quadratic",
/// "step", "step_quad", "noisy_quadratic", "staircase". The 1-d members
/// reject dim != 1; the quadratic families accept any dim >= 1.
NoisyObjective make_objective(const std::string& descriptor, int dim);

/// Wraps a base objective with additive sigma * N(0,1) observation noise.
/// The mean objective is unchanged, so the lower bound carries over; eta
/// defaults to infinity, which is honest for bounded bases (pass a finite
/// moment order for unbounded ones).
NoisyObjective with_gaussian_noise(
    const NoisyObjective& base, double sigma,
    double eta = std::numeric_limits<double>::infinity());

/// Fixed evaluation points used by oracle comparisons, dim 1 to 3.
std::vector<Point> standard_grid(int dim);

}  // namespace mollify

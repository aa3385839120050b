#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mollify/errors.hpp"

namespace mollify {

/// Regularity metadata a user declares about an objective. alpha is the
/// local Holder exponent (0 admits bounded jumps, 1 is Lipschitz),
/// beta_upper controls growth at infinity, eta is the noise moment order
/// (infinity means bounded noise).
struct RegularityProfile {
  double alpha = 1.0;
  double beta_upper = 1.0;
  double eta = std::numeric_limits<double>::infinity();
  bool deterministic = false;

  void validate() const {
    if (!(alpha >= 0.0) || !(alpha <= 1.0)) {
      throw Error("alpha must lie in [0, 1], got " + std::to_string(alpha));
    }
    if (!(beta_upper >= alpha)) {
      throw Error("beta_upper must be >= alpha");
    }
    if (!(eta >= 2.0)) {
      throw Error("eta must be >= 2 (or infinity for bounded noise)");
    }
  }
};

enum class SmootherKind { MeanSmooth, ExpSmooth };

enum class VerdictLevel {
  NoGuarantee = 0,
  BoundaryCaseNeedsConstant = 1,
  SubsequenceOnly = 2,
  FullConvergence = 3,
};

enum class ScheduleMode { Stochastic, Deterministic };

/// Outcome of the schedule check, with every evaluated inequality recorded.
struct ConvergenceVerdict {
  VerdictLevel level = VerdictLevel::NoGuarantee;
  std::vector<std::string> reasons;
  std::optional<double> c_star_used;
};

const char* to_string(VerdictLevel level);
const char* to_string(SmootherKind kind);

/// Checks the step/smoothing exponents (iota, kappa) and scales (c_beta,
/// c_gamma) against the convergence conditions for the declared regularity.
///
/// Stochastic mode: full convergence needs kappa*(2 - 3*alpha/2) < iota and
/// min{1 - kappa/2, iota - kappa*(3/2 - alpha)} > 1/eta; the first
/// inequality alone gives convergence along a subsequence.
///
/// Deterministic mode: kappa*(1 - alpha/2) < iota gives a subsequence
/// guarantee, upgraded to full convergence when kappa*(3/2 - alpha) < iota.
/// On the boundary kappa*(1 - alpha/2) == iota the scales decide via
/// c_beta * c_gamma^(alpha/2 - 1) < c_star; c_star = 2 is known for the
/// exponential smoother only, so the mean-smoother boundary is reported as
/// unverifiable rather than guessed.
ConvergenceVerdict validate_schedules(double iota, double kappa,
                                      const RegularityProfile& profile,
                                      ScheduleMode mode, double c_beta,
                                      double c_gamma, SmootherKind smoother);

}  // namespace mollify

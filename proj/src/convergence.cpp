#include "mollify/convergence.hpp"

#include <cstdio>

namespace mollify {

namespace {

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string describe(const std::string& name, double lhs, const char* rel,
                     double rhs, bool passed) {
  return name + ": " + fmt(lhs) + (passed ? " " : " !") + rel + " " + fmt(rhs) +
         (passed ? " (holds)" : " (fails)");
}

}  // namespace

const char* to_string(VerdictLevel level) {
  switch (level) {
    case VerdictLevel::NoGuarantee:
      return "NoGuarantee";
    case VerdictLevel::BoundaryCaseNeedsConstant:
      return "BoundaryCaseNeedsConstant";
    case VerdictLevel::SubsequenceOnly:
      return "SubsequenceOnly";
    case VerdictLevel::FullConvergence:
      return "FullConvergence";
  }
  return "?";
}

const char* to_string(SmootherKind kind) {
  return kind == SmootherKind::MeanSmooth ? "mean" : "exp";
}

ConvergenceVerdict validate_schedules(double iota, double kappa,
                                      const RegularityProfile& profile,
                                      ScheduleMode mode, double c_beta,
                                      double c_gamma, SmootherKind smoother) {
  if (!(iota > 0.0) || !(iota <= 1.0)) {
    throw Error("iota must lie in (0, 1], got " + std::to_string(iota));
  }
  if (!(kappa > 0.0) || !(kappa <= 1.0)) {
    throw Error("kappa must lie in (0, 1], got " + std::to_string(kappa));
  }
  if (!(c_beta > 0.0) || !(c_gamma > 0.0)) {
    throw Error("schedule scales must be positive");
  }
  profile.validate();
  const double alpha = profile.alpha;

  ConvergenceVerdict v;
  if (mode == ScheduleMode::Stochastic) {
    // 1/eta with eta = inf encodes bounded noise: the threshold is 0.
    const double threshold = 1.0 / profile.eta;
    const double lhs1 = kappa * (2.0 - 1.5 * alpha);
    const bool subsequence = lhs1 < iota;
    v.reasons.push_back(
        describe("kappa*(2 - 3*alpha/2) < iota", lhs1, "<", iota, subsequence));
    const double lhs2 = std::min(1.0 - kappa / 2.0, iota - kappa * (1.5 - alpha));
    const bool limit = lhs2 > threshold;
    v.reasons.push_back(describe("min{1 - kappa/2, iota - kappa*(3/2 - alpha)} > 1/eta",
                                 lhs2, ">", threshold, limit));
    if (subsequence && limit) {
      v.level = VerdictLevel::FullConvergence;
    } else if (subsequence) {
      v.level = VerdictLevel::SubsequenceOnly;
    } else {
      v.level = VerdictLevel::NoGuarantee;
    }
    return v;
  }

  // Deterministic mode.
  const double lhs1 = kappa * (1.0 - alpha / 2.0);
  const double lhs2 = kappa * (1.5 - alpha);
  if (lhs1 < iota) {
    const bool upgrade = lhs2 < iota;
    v.reasons.push_back(
        describe("kappa*(1 - alpha/2) < iota", lhs1, "<", iota, true));
    v.reasons.push_back(
        describe("kappa*(3/2 - alpha) < iota", lhs2, "<", iota, upgrade));
    v.level = upgrade ? VerdictLevel::FullConvergence : VerdictLevel::SubsequenceOnly;
    return v;
  }
  if (lhs1 == iota) {
    v.reasons.push_back(
        describe("kappa*(1 - alpha/2) == iota", lhs1, "==", iota, true));
    const double ratio = c_beta * std::pow(c_gamma, alpha / 2.0 - 1.0);
    if (smoother == SmootherKind::ExpSmooth) {
      const double c_star = 2.0;
      const bool ok = ratio < c_star;
      v.reasons.push_back(describe("c_beta * c_gamma^(alpha/2 - 1) < c_star",
                                   ratio, "<", c_star, ok));
      if (ok) {
        v.level = VerdictLevel::BoundaryCaseNeedsConstant;
        v.c_star_used = c_star;
      } else {
        v.level = VerdictLevel::NoGuarantee;
      }
    } else {
      v.reasons.push_back(
          "c_beta * c_gamma^(alpha/2 - 1) = " + fmt(ratio) +
          ": constant unverifiable (c_star unknown for the mean smoother)");
      v.level = VerdictLevel::BoundaryCaseNeedsConstant;
    }
    return v;
  }
  v.reasons.push_back(
      describe("kappa*(1 - alpha/2) < iota", lhs1, "<", iota, false));
  v.level = VerdictLevel::NoGuarantee;
  return v;
}

}  // namespace mollify

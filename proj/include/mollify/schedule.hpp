#pragma once

#include <cmath>
#include <string>

#include "mollify/errors.hpp"

namespace mollify {

/// Power-law sequence scale * n^(-exponent), n >= 1. Covers both the step
/// sizes beta_n and the smoothing parameters gamma_n.
class Schedule {
 public:
  Schedule(double scale, double exponent) : scale_(scale), exponent_(exponent) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw Error("schedule scale must be positive and finite, got " +
                  std::to_string(scale));
    }
    if (!(exponent > 0.0) || !(exponent <= 1.0)) {
      throw Error("schedule exponent must lie in (0, 1], got " +
                  std::to_string(exponent));
    }
  }

  double scale() const { return scale_; }
  double exponent() const { return exponent_; }

  /// Value at iteration n (n >= 1); strictly positive and non-increasing.
  double value(long n) const {
    return scale_ * std::pow(static_cast<double>(n), -exponent_);
  }

 private:
  double scale_;
  double exponent_;
};

inline double schedule_value(const Schedule& s, long n) { return s.value(n); }

}  // namespace mollify

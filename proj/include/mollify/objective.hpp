#pragma once

#include <any>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mollify/convergence.hpp"
#include "mollify/errors.hpp"
#include "mollify/rng.hpp"

namespace mollify {

/// Optimizer state: a point in R^d.
using Point = std::vector<double>;

inline void check_finite(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw EvaluationError(std::string(what) + " contains a non-finite entry");
    }
  }
}

/// Opaque noise token. Each objective owns the payload type (index batches
/// for ranking losses, scalar draws for additive noise); the optimizer only
/// passes tokens around and never inspects them.
class Noise {
 public:
  Noise() = default;
  template <typename T>
  explicit Noise(T value) : payload_(std::move(value)) {}

  bool empty() const { return !payload_.has_value(); }

  template <typename T>
  const T& as() const {
    const T* p = std::any_cast<T>(&payload_);
    if (p == nullptr) {
      throw Error("noise token holds a different payload type than expected");
    }
    return *p;
  }

 private:
  std::any payload_;
};

/// A noisy objective: an evaluator l(theta, u), a sampler for U, declared
/// regularity, and a finite lower bound on the mean objective.
struct NoisyObjective {
  std::string descriptor;
  int dim = 0;  // required input dimension
  RegularityProfile profile;
  double lower_bound = 0.0;
  /// Declared scalar bound on the Holder constant J(u) over the test domain.
  double j_bound = 1.0;
  std::function<double(std::span<const double>, const Noise&)> evaluate;
  std::function<Noise(RngStream&)> sample_noise;  // null when deterministic

  Noise draw_noise(RngStream& rng) const {
    if (profile.deterministic || !sample_noise) return Noise{};
    return sample_noise(rng);
  }

  double operator()(std::span<const double> theta, const Noise& u) const {
    return evaluate(theta, u);
  }
};

}  // namespace mollify

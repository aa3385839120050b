#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mollify/errors.hpp"

namespace mollify {

/// Deterministic scalar field; noisy objectives are checked per fixed noise
/// value by binding the token before handing the field to the oracle.
using ScalarField = std::function<double(std::span<const double>)>;

/// Tensor quadrature settings in standardized z-space. Each axis of
/// [-truncation, truncation] is split into base panels derived from n_nodes;
/// panels refine adaptively until the local tolerance is met, which keeps
/// jump discontinuities from polluting the global estimate.
struct QuadratureSpec {
  int n_nodes = 512;
  double truncation = 8.0;
  int dim = 1;
  double tol = 1e-10;

  void validate() const {
    if (dim < 1 || dim > 3) {
      throw DimensionError("quadrature oracle supports dim in {1, 2, 3}, got " +
                           std::to_string(dim));
    }
    if (n_nodes < 64) throw Error("n_nodes must be >= 64");
    if (!(truncation >= 8.0)) throw Error("truncation must be >= 8");
    if (!(tol > 0.0)) throw Error("tol must be positive");
  }

  static QuadratureSpec defaults(int dim) {
    QuadratureSpec s;
    s.dim = dim;
    return s;
  }
};

/// Gaussian-convolved value: integral of f(theta + sqrt(gamma) z) phi(z) dz.
double oracle_mean_value(const ScalarField& f, std::span<const double> theta,
                         double gamma, const QuadratureSpec& spec);

/// Gradient of the convolved value, via the centered identity
/// gamma^{-1/2} * integral of (f(theta + sqrt(gamma) z) - f(theta)) z_i phi(z) dz.
std::vector<double> oracle_mean_grad(const ScalarField& f,
                                     std::span<const double> theta, double gamma,
                                     const QuadratureSpec& spec);

/// Entropic value: -log integral of exp(-f(theta + sqrt(gamma) z)) phi(z) dz,
/// evaluated with a stabilizing shift.
double oracle_exp_value(const ScalarField& f, std::span<const double> theta,
                        double gamma, const QuadratureSpec& spec);

/// Gradient of the entropic value: (theta - posterior mean) / gamma, where
/// the posterior tilts the Gaussian by exp(-f).
std::vector<double> oracle_exp_grad(const ScalarField& f,
                                    std::span<const double> theta, double gamma,
                                    const QuadratureSpec& spec);

/// Posterior mean point of the exp(-f)-tilted Gaussian.
std::vector<double> oracle_exp_posterior_mean(const ScalarField& f,
                                              std::span<const double> theta,
                                              double gamma,
                                              const QuadratureSpec& spec);

/// Posterior expectation of f itself; lower bar of the sandwich
/// posterior-mean-of-f <= exp value <= mean value.
double oracle_exp_posterior_loss(const ScalarField& f,
                                 std::span<const double> theta, double gamma,
                                 const QuadratureSpec& spec);

}  // namespace mollify

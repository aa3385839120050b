#include "mollify/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace mollify {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;

double phi1(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
/// recurrence; exact to machine precision for the small orders used here.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;

  explicit GaussRule(int n) : x(n), w(n) {
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
      double z = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-15) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
      w[n - 1 - i] = w[i];
    }
  }
};

const GaussRule& rule8() {
  static const GaussRule r(8);
  return r;
}
const GaussRule& rule16() {
  static const GaussRule r(16);
  return r;
}

struct Segment {
  double a, b;
  double value;  // 16-point estimate
  double err;    // |16-point - 8-point|
};

struct SegmentWorse {
  bool operator()(const Segment& s, const Segment& t) const {
    return s.err < t.err;
  }
};

template <typename F>
Segment eval_segment(const F& g, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const GaussRule& r16 = rule16();
  const GaussRule& r8 = rule8();
  double v16 = 0.0;
  for (int i = 0; i < 16; ++i) v16 += r16.w[i] * g(c + h * r16.x[i]);
  double v8 = 0.0;
  for (int i = 0; i < 8; ++i) v8 += r8.w[i] * g(c + h * r8.x[i]);
  return Segment{a, b, h * v16, std::abs(h * (v16 - v8))};
}

/// Globally adaptive 1-d quadrature: bisect the worst segment until the
/// summed error estimate meets epsabs or the segment budget runs out.
/// Refinement concentrates where the 16/8-point estimates disagree, so jump
/// discontinuities are localized to ~1e-13 width instead of contaminating
/// the whole panel they land in.
template <typename F>
double integrate_1d(const F& g, double lo, double hi, int base_segments,
                    double epsabs, int max_segments) {
  std::vector<Segment> segs;
  segs.reserve(64);
  const double width = (hi - lo) / base_segments;
  for (int i = 0; i < base_segments; ++i) {
    const double a = lo + i * width;
    const double b = (i + 1 == base_segments) ? hi : a + width;
    segs.push_back(eval_segment(g, a, b));
  }
  std::make_heap(segs.begin(), segs.end(), SegmentWorse{});
  while (static_cast<int>(segs.size()) < max_segments) {
    double toterr = 0.0;
    for (const Segment& s : segs) toterr += s.err;
    if (toterr <= epsabs) break;
    std::pop_heap(segs.begin(), segs.end(), SegmentWorse{});
    const Segment worst = segs.back();
    segs.pop_back();
    if (worst.b - worst.a < 1e-13) {
      // Cannot localize further; accept this segment's estimate as-is.
      Segment done = worst;
      done.err = 0.0;
      segs.push_back(done);
      std::push_heap(segs.begin(), segs.end(), SegmentWorse{});
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    segs.push_back(eval_segment(g, worst.a, mid));
    std::push_heap(segs.begin(), segs.end(), SegmentWorse{});
    segs.push_back(eval_segment(g, mid, worst.b));
    std::push_heap(segs.begin(), segs.end(), SegmentWorse{});
  }
  double total = 0.0;
  for (const Segment& s : segs) total += s.value;
  return total;
}

/// Integral over [-T, T]^dim of prod_k phi(z_k) * g(z) by nested 1-d
/// quadrature. Inner axes run at a tighter tolerance so their residual
/// error looks flat to the outer refinement loop.
class GaussianBoxIntegrator {
 public:
  explicit GaussianBoxIntegrator(const QuadratureSpec& spec)
      : spec_(spec), base_segments_(std::max(8, spec.n_nodes / 32)) {}

  template <typename G>
  double run(const G& g) {
    std::array<double, 3> z{};
    return axis(g, z, 0, spec_.tol);
  }

 private:
  template <typename G>
  double axis(const G& g, std::array<double, 3>& z, int k, double tol) {
    const double t_max = spec_.truncation;
    auto slice = [&](double t) -> double {
      z[k] = t;
      const double w = phi1(t);
      if (k + 1 == spec_.dim) {
        const double v = g(std::span<const double>(z.data(), spec_.dim));
        if (!std::isfinite(v)) {
          throw EvaluationError("quadrature integrand is non-finite");
        }
        return w * v;
      }
      return w * axis(g, z, k + 1, std::max(1e-13, 0.01 * tol));
    };
    return integrate_1d(slice, -t_max, t_max, base_segments_, tol, 4096);
  }

  QuadratureSpec spec_;
  int base_segments_;
};

void check_inputs(std::span<const double> theta, double gamma,
                  const QuadratureSpec& spec) {
  spec.validate();
  if (static_cast<int>(theta.size()) != spec.dim) {
    throw DimensionError("theta dimension " + std::to_string(theta.size()) +
                         " does not match quadrature dim " +
                         std::to_string(spec.dim));
  }
  if (!(gamma > 0.0)) throw Error("gamma must be positive");
}

template <typename G>
double integrate(const QuadratureSpec& spec, const G& g) {
  GaussianBoxIntegrator box(spec);
  return box.run(g);
}

std::array<double, 3> shifted(std::span<const double> theta, double root_gamma,
                              std::span<const double> z) {
  std::array<double, 3> x{};
  for (std::size_t i = 0; i < theta.size(); ++i) {
    x[i] = theta[i] + root_gamma * z[i];
  }
  return x;
}

/// Normalizing integral of exp(-(f - shift)) against the Gaussian, with
/// shift = f(theta) so the integrand stays within double range for losses
/// of moderate variation.
double tilted_mass(const ScalarField& f, std::span<const double> theta,
                   double gamma, const QuadratureSpec& spec, double shift) {
  const double rg = std::sqrt(gamma);
  return integrate(spec, [&](std::span<const double> z) {
    const auto x = shifted(theta, rg, z);
    const double e = shift - f(std::span<const double>(x.data(), theta.size()));
    if (e > 700.0) throw EvaluationError("exp-smoothing integrand overflows");
    return std::exp(e);
  });
}

}  // namespace

double oracle_mean_value(const ScalarField& f, std::span<const double> theta,
                         double gamma, const QuadratureSpec& spec) {
  check_inputs(theta, gamma, spec);
  const double rg = std::sqrt(gamma);
  return integrate(spec, [&](std::span<const double> z) {
    const auto x = shifted(theta, rg, z);
    return f(std::span<const double>(x.data(), theta.size()));
  });
}

std::vector<double> oracle_mean_grad(const ScalarField& f,
                                     std::span<const double> theta, double gamma,
                                     const QuadratureSpec& spec) {
  check_inputs(theta, gamma, spec);
  const double rg = std::sqrt(gamma);
  const double base = f(theta);
  std::vector<double> grad(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    grad[i] = integrate(spec, [&](std::span<const double> z) {
                const auto x = shifted(theta, rg, z);
                const double df =
                    f(std::span<const double>(x.data(), theta.size())) - base;
                return df * z[i];
              }) /
              rg;
  }
  return grad;
}

double oracle_exp_value(const ScalarField& f, std::span<const double> theta,
                        double gamma, const QuadratureSpec& spec) {
  check_inputs(theta, gamma, spec);
  const double shift = f(theta);
  const double mass = tilted_mass(f, theta, gamma, spec, shift);
  if (!(mass > 0.0)) {
    throw EvaluationError("exp-smoothing normalizer vanished under quadrature");
  }
  return shift - std::log(mass);
}

std::vector<double> oracle_exp_posterior_mean(const ScalarField& f,
                                              std::span<const double> theta,
                                              double gamma,
                                              const QuadratureSpec& spec) {
  check_inputs(theta, gamma, spec);
  const double rg = std::sqrt(gamma);
  const double shift = f(theta);
  const double mass = tilted_mass(f, theta, gamma, spec, shift);
  if (!(mass > 0.0)) {
    throw EvaluationError("exp-smoothing normalizer vanished under quadrature");
  }
  std::vector<double> mean(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double num = integrate(spec, [&](std::span<const double> z) {
      const auto x = shifted(theta, rg, z);
      const std::span<const double> xs(x.data(), theta.size());
      const double e = shift - f(xs);
      if (e > 700.0) throw EvaluationError("exp-smoothing integrand overflows");
      return std::exp(e) * xs[i];
    });
    mean[i] = num / mass;
  }
  return mean;
}

std::vector<double> oracle_exp_grad(const ScalarField& f,
                                    std::span<const double> theta, double gamma,
                                    const QuadratureSpec& spec) {
  auto mean = oracle_exp_posterior_mean(f, theta, gamma, spec);
  std::vector<double> grad(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    grad[i] = (theta[i] - mean[i]) / gamma;
  }
  return grad;
}

double oracle_exp_posterior_loss(const ScalarField& f,
                                 std::span<const double> theta, double gamma,
                                 const QuadratureSpec& spec) {
  check_inputs(theta, gamma, spec);
  const double rg = std::sqrt(gamma);
  const double shift = f(theta);
  const double mass = tilted_mass(f, theta, gamma, spec, shift);
  if (!(mass > 0.0)) {
    throw EvaluationError("exp-smoothing normalizer vanished under quadrature");
  }
  const double num = integrate(spec, [&](std::span<const double> z) {
    const auto x = shifted(theta, rg, z);
    const std::span<const double> xs(x.data(), theta.size());
    const double fv = f(xs);
    const double e = shift - fv;
    if (e > 700.0) throw EvaluationError("exp-smoothing integrand overflows");
    return std::exp(e) * fv;
  });
  return num / mass;
}

}  // namespace mollify

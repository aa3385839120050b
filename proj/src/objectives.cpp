#include "mollify/objectives.hpp"

#include <cmath>

namespace mollify {

namespace {

double sq_norm_half(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return 0.5 * s;
}

void require_dim(const std::string& descriptor, int dim, int wanted) {
  if (dim != wanted) {
    throw DimensionError("objective '" + descriptor + "' requires dim " +
                         std::to_string(wanted) + ", got " + std::to_string(dim));
  }
}

}  // namespace

NoisyObjective make_objective(const std::string& descriptor, int dim) {
  if (dim < 1) throw DimensionError("dim must be >= 1");
  NoisyObjective obj;
  obj.descriptor = descriptor;
  obj.dim = dim;

  if (descriptor == "quadratic") {
    obj.profile = {.alpha = 1.0, .beta_upper = 2.0, .deterministic = true};
    obj.lower_bound = 0.0;
    obj.j_bound = 6.0;
    obj.evaluate = [](std::span<const double> x, const Noise&) {
      return sq_norm_half(x);
    };
    return obj;
  }

  if (descriptor == "step") {
    require_dim(descriptor, dim, 1);
    obj.profile = {.alpha = 0.0, .beta_upper = 1.0, .deterministic = true};
    obj.lower_bound = 0.0;
    obj.j_bound = 1.0;
    obj.evaluate = [](std::span<const double> x, const Noise&) {
      return x[0] < 0.0 ? 1.0 : 0.0;
    };
    return obj;
  }

  if (descriptor == "step_quad") {
    require_dim(descriptor, dim, 1);
    obj.profile = {.alpha = 0.0, .beta_upper = 2.0, .deterministic = true};
    obj.lower_bound = 0.0;
    obj.j_bound = 2.0;
    obj.evaluate = [](std::span<const double> x, const Noise&) {
      return (x[0] < 0.0 ? 1.0 : 0.0) + 0.05 * x[0] * x[0];
    };
    return obj;
  }

  if (descriptor == "noisy_quadratic") {
    obj.profile = {.alpha = 1.0, .beta_upper = 2.0, .eta = 10.0,
                   .deterministic = false};
    obj.lower_bound = -100.0;  // A finite floor over the tested range.
    obj.j_bound = 8.0;
    obj.evaluate = [](std::span<const double> x, const Noise& u) {
      double s = sq_norm_half(x);
      if (!u.empty()) {
        const auto& shift = u.as<std::vector<double>>();
        for (std::size_t i = 0; i < x.size() && i < shift.size(); ++i) {
          s += shift[i] * x[i];
        }
      }
      return s;
    };
    const int d = dim;
    obj.sample_noise = [d](RngStream& rng) {
      std::vector<double> shift(d);
      const double sd = std::sqrt(0.1);
      for (int i = 0; i < d; ++i) shift[i] = sd * rng.normal();
      return Noise(shift);
    };
    return obj;
  }

  if (descriptor == "staircase") {
    require_dim(descriptor, dim, 1);
    obj.profile = {.alpha = 0.0, .beta_upper = 1.0, .deterministic = true};
    obj.lower_bound = 0.0;
    obj.j_bound = 1.0;
    obj.evaluate = [](std::span<const double> x, const Noise&) {
      return 0.25 * std::abs(std::floor(4.0 * x[0]));
    };
    return obj;
  }

  throw Error("unknown objective descriptor '" + descriptor + "'");
}

std::vector<NoisyObjective> builtin_corpus() {
  return {
      make_objective("quadratic", 2),
      make_objective("step", 1),
      make_objective("step_quad", 1),
      make_objective("noisy_quadratic", 2),
      make_objective("staircase", 1),
  };
}

namespace {

struct AddedNoise {
  Noise base;
  double g = 0.0;
};

}  // namespace

NoisyObjective with_gaussian_noise(const NoisyObjective& base, double sigma,
                                   double eta) {
  if (!(sigma > 0.0)) throw Error("sigma must be positive");
  NoisyObjective obj = base;
  obj.descriptor = base.descriptor + "+noise";
  obj.profile.deterministic = false;
  obj.profile.eta = eta;
  auto base_eval = base.evaluate;
  obj.evaluate = [base_eval, sigma](std::span<const double> x, const Noise& u) {
    if (u.empty()) return base_eval(x, Noise{});
    const auto& token = u.as<AddedNoise>();
    return base_eval(x, token.base) + sigma * token.g;
  };
  auto base_obj = base;
  obj.sample_noise = [base_obj](RngStream& rng) {
    AddedNoise token;
    token.base = base_obj.draw_noise(rng);
    token.g = rng.normal();
    return Noise(token);
  };
  return obj;
}

std::vector<Point> standard_grid(int dim) {
  switch (dim) {
    case 1:
      return {{-2.0}, {-1.0}, {0.0}, {1.0}, {2.0}};
    case 2:
      return {{0.0, 0.0}, {1.0, -2.0}, {-1.5, 0.5}, {2.0, 1.0}, {-2.0, -2.0}};
    case 3:
      return {{0.0, 0.0, 0.0},
              {1.0, -1.0, 1.0},
              {-2.0, 0.5, 1.0},
              {2.0, 2.0, -1.0},
              {-1.0, -2.0, 0.5}};
    default:
      throw DimensionError("standard_grid covers dim 1 to 3");
  }
}

}  // namespace mollify

#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "mollify/objectives.hpp"
#include "mollify/oracle.hpp"

using namespace mollify;

namespace {

double dist(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += (x[i] - y[i]) * (x[i] - y[i]);
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("the corpus spans both regularity regimes and a stochastic member") {
  const auto corpus = builtin_corpus();
  REQUIRE(corpus.size() >= 5);

  std::set<std::string> names;
  bool has_smooth = false, has_jump = false, has_noise = false;
  for (const auto& obj : corpus) {
    names.insert(obj.descriptor);
    obj.profile.validate();
    CHECK(obj.dim >= 1);
    CHECK(std::isfinite(obj.lower_bound));
    CHECK(obj.j_bound > 0.0);
    if (obj.profile.alpha == 1.0) has_smooth = true;
    if (obj.profile.alpha == 0.0) has_jump = true;
    if (!obj.profile.deterministic) has_noise = true;
  }
  CHECK(names.size() == corpus.size());
  CHECK(has_smooth);
  CHECK(has_jump);
  CHECK(has_noise);
}

TEST_CASE("pointwise values match the declared formulas") {
  const auto quad = make_objective("quadratic", 3);
  const std::vector<double> x{1.0, -2.0, 0.5};
  CHECK(quad(x, Noise{}) == 0.5 * (1.0 + 4.0 + 0.25));

  const auto step = make_objective("step", 1);
  const std::vector<double> neg{-0.5}, zero{0.0}, pos{0.5};
  CHECK(step(neg, Noise{}) == 1.0);
  CHECK(step(zero, Noise{}) == 0.0);
  CHECK(step(pos, Noise{}) == 0.0);

  const auto sq = make_objective("step_quad", 1);
  const std::vector<double> m2{-2.0}, one{1.0};
  CHECK(sq(m2, Noise{}) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(sq(one, Noise{}) == doctest::Approx(0.05).epsilon(1e-15));

  const auto stair = make_objective("staircase", 1);
  const std::vector<double> a{0.3}, b{-0.1}, c{1.1};
  CHECK(stair(a, Noise{}) == 0.25);
  CHECK(stair(b, Noise{}) == 0.25);
  CHECK(stair(c, Noise{}) == 1.0);
  CHECK(stair(zero, Noise{}) == 0.0);
}

TEST_CASE("descriptor and dimension validation") {
  CHECK_THROWS_AS(make_objective("no_such_objective", 1), Error);
  CHECK_THROWS_AS(make_objective("quadratic", 0), DimensionError);
  CHECK_THROWS_AS(make_objective("step", 2), DimensionError);
  CHECK_THROWS_AS(make_objective("staircase", 3), DimensionError);
  CHECK_NOTHROW(make_objective("noisy_quadratic", 4));
}

TEST_CASE("deterministic members ignore the noise token") {
  for (const char* name : {"quadratic", "step", "step_quad", "staircase"}) {
    const int dim = std::string(name) == "quadratic" ? 2 : 1;
    const auto obj = make_objective(name, dim);
    std::vector<double> x(obj.dim, 0.37);
    CHECK(obj(x, Noise{}) == obj(x, Noise(3.7)));
    RngStream rng(1);
    CHECK(obj.draw_noise(rng).empty());
  }
}

TEST_CASE("the stochastic member is unbiased around the quadratic") {
  const auto obj = make_objective("noisy_quadratic", 2);
  CHECK_FALSE(obj.profile.deterministic);
  CHECK(obj.profile.eta == 10.0);

  const std::vector<double> x{1.0, 1.0};
  CHECK(obj(x, Noise{}) == 1.0);  // empty token means no shift

  RngStream rng(31);
  const Noise u1 = obj.draw_noise(rng);
  const Noise u2 = obj.draw_noise(rng);
  CHECK(obj(x, u1) == obj(x, u1));
  CHECK(obj(x, u1) != obj(x, u2));

  double acc = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const Noise u = obj.draw_noise(rng);
    acc += obj(x, u);
  }
  // Var(u . x) = 0.1 * |x|^2 = 0.2, so 3 standard errors is ~0.021.
  CHECK(std::abs(acc / n - 1.0) < 0.03);
}

TEST_CASE("declared growth bounds hold over random pairs") {
  RngStream rng(57);
  for (const auto& obj : builtin_corpus()) {
    const Noise u = [&]() {
      RngStream noise_rng(5);
      return obj.draw_noise(noise_rng);
    }();
    const auto& p = obj.profile;
    for (int trial = 0; trial < 10000; ++trial) {
      std::vector<double> x(obj.dim), y(obj.dim);
      for (int i = 0; i < obj.dim; ++i) {
        x[i] = 6.0 * rng.uniform() - 3.0;
        y[i] = 6.0 * rng.uniform() - 3.0;
      }
      const double r = dist(x, y);
      const double diff = std::abs(obj(x, u) - obj(y, u));
      const double bound =
          obj.j_bound * (std::pow(r, p.alpha) + std::pow(r, p.beta_upper));
      CHECK(diff <= bound + 1e-12);
    }
  }
}

TEST_CASE("values never fall below the declared lower bound") {
  RngStream rng(91);
  for (const auto& obj : builtin_corpus()) {
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<double> x(obj.dim);
      for (int i = 0; i < obj.dim; ++i) x[i] = 8.0 * rng.uniform() - 4.0;
      const Noise u = obj.draw_noise(rng);
      CHECK(obj(x, u) >= obj.lower_bound);
    }
  }
}

TEST_CASE("smoothing the jump member reproduces the Gaussian tail") {
  const auto obj = make_objective("step", 1);
  const ScalarField f = [&obj](std::span<const double> x) {
    return obj(x, Noise{});
  };
  const auto spec = QuadratureSpec::defaults(1);
  const double gamma = 0.25;
  for (const auto& theta : standard_grid(1)) {
    const double want = 0.5 * std::erfc(theta[0] / std::sqrt(gamma) / std::sqrt(2.0));
    CHECK(std::abs(oracle_mean_value(f, theta, gamma, spec) - want) < 1e-9);
  }
}

TEST_CASE("additive observation noise keeps the mean objective") {
  const auto base = make_objective("quadratic", 2);
  const auto noisy = with_gaussian_noise(base, 0.5);
  CHECK_FALSE(noisy.profile.deterministic);
  CHECK(std::isinf(noisy.profile.eta));
  CHECK(noisy.descriptor != base.descriptor);
  CHECK(noisy.lower_bound == base.lower_bound);

  const std::vector<double> x{0.7, -0.3};
  const double clean = base(x, Noise{});
  RngStream rng(12);
  double acc = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) acc += noisy(x, noisy.draw_noise(rng));
  // 3 standard errors at sigma = 0.5 is ~0.024.
  CHECK(std::abs(acc / n - clean) < 0.03);

  const Noise u = noisy.draw_noise(rng);
  CHECK(noisy(x, u) != clean);
  CHECK(noisy(x, u) == noisy(x, u));
}

TEST_CASE("additive noise composes with an already noisy base") {
  const auto base = make_objective("noisy_quadratic", 2);
  const auto wrapped = with_gaussian_noise(base, 0.25, 10.0);
  CHECK(wrapped.profile.eta == 10.0);
  RngStream rng(8);
  const Noise u = wrapped.draw_noise(rng);
  const std::vector<double> x{1.0, 2.0};
  CHECK(std::isfinite(wrapped(x, u)));
  CHECK(wrapped(x, u) == wrapped(x, u));
}

TEST_CASE("noise wrapper rejects a degenerate width") {
  const auto base = make_objective("quadratic", 1);
  CHECK_THROWS_AS(with_gaussian_noise(base, 0.0), Error);
  CHECK_THROWS_AS(with_gaussian_noise(base, -1.0), Error);
}

TEST_CASE("evaluation grids cover dimensions one through three") {
  for (int dim : {1, 2, 3}) {
    const auto grid = standard_grid(dim);
    CHECK(grid.size() == 5);
    for (const auto& p : grid) CHECK(p.size() == static_cast<std::size_t>(dim));
  }
  CHECK_THROWS_AS(standard_grid(4), DimensionError);
}

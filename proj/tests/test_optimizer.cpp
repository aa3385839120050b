#include <doctest.h>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "mollify/objectives.hpp"
#include "mollify/optimizer.hpp"

using namespace mollify;

namespace {

RunConfig base_config() {
  RunConfig cfg{Schedule(0.5, 0.5), Schedule(0.5, 0.2)};
  cfg.n_iterations = 10;
  cfg.n_samples = 64;
  cfg.master_seed = 1;
  return cfg;
}

}  // namespace

TEST_CASE("the update rule is plain descent") {
  const std::vector<double> theta{1.0, 2.0};
  const std::vector<double> grad{2.0, -2.0};
  const auto next = step(theta, 0.5, grad);
  REQUIRE(next.size() == 2);
  CHECK(next[0] == 0.0);
  CHECK(next[1] == 3.0);

  const std::vector<double> short_grad{1.0};
  CHECK_THROWS_AS(step(theta, 0.5, short_grad), DimensionError);
  const std::vector<double> huge{1e308, 0.0};
  CHECK_THROWS_AS(step(theta, 1e308, huge), EvaluationError);
}

TEST_CASE("recording covers the first, last, and periodic iterations") {
  CHECK(should_record(1, 100, 10));
  CHECK(should_record(50, 100, 10));
  CHECK(should_record(100, 100, 7));
  CHECK_FALSE(should_record(55, 100, 10));
  CHECK_FALSE(should_record(2, 100, 10));

  CHECK(expected_record_count(100, 10) == 11);
  CHECK(expected_record_count(7, 3) == 4);
  CHECK(expected_record_count(1, 1) == 1);
  CHECK(expected_record_count(5, 7) == 2);
}

TEST_CASE("configuration validation rejects malformed values") {
  auto cfg = base_config();
  cfg.n_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);

  cfg = base_config();
  cfg.n_samples = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);

  cfg = base_config();
  cfg.record_every = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);

  cfg = base_config();
  cfg.n_threads = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);

  cfg = base_config();
  cfg.target_ess = 64.0;  // must be strictly inside (1, n_samples)
  CHECK_THROWS_AS(cfg.validate(), Error);

  CHECK_NOTHROW(base_config().validate());
}

TEST_CASE("a constant objective freezes the iterate under mean smoothing") {
  NoisyObjective obj;
  obj.descriptor = "const";
  obj.dim = 2;
  obj.profile.deterministic = true;
  obj.evaluate = [](std::span<const double>, const Noise&) { return 7.0; };

  auto cfg = base_config();
  cfg.n_iterations = 25;
  cfg.record_every = 5;
  const Point theta0{0.25, -1.5};
  const auto trace = run(obj, theta0, cfg);

  CHECK(trace.final_theta == theta0);
  for (const auto& r : trace.records) {
    CHECK(r.theta == theta0);
    CHECK(r.grad_norm == 0.0);
    CHECK(r.value == 7.0);
  }
  CHECK(trace.running_min_grad_norm == 0.0);
}

TEST_CASE("trace rows hold the pre-update state and schedule values") {
  const auto obj = make_objective("quadratic", 2);
  auto cfg = base_config();
  cfg.n_iterations = 1;
  cfg.n_samples = 128;
  cfg.master_seed = 9;
  const Point theta0{1.0, -2.0};
  const auto trace = run(obj, theta0, cfg);

  REQUIRE(trace.records.size() == 1);
  const auto& r = trace.records[0];
  CHECK(r.n == 1);
  CHECK(r.theta == theta0);
  CHECK(r.beta_n == cfg.beta.value(1));
  CHECK(r.gamma_n == cfg.gamma.value(1));
  CHECK(r.ess == 128.0);
  CHECK(r.rescale_lambda == 1.0);

  // The run is exactly one estimate plus one step, reproducible from parts.
  const auto est = grad_mean_smooth(obj, theta0, cfg.gamma.value(1), Noise{},
                                    cfg.n_samples, SampleStreams{9, 1});
  CHECK(trace.final_theta == step(theta0, cfg.beta.value(1), est.gradient));
  // Accumulated in coordinate order, exactly as the recursion computes it.
  CHECK(r.grad_norm == std::sqrt(est.gradient[0] * est.gradient[0] +
                                 est.gradient[1] * est.gradient[1]));
}

TEST_CASE("record counts follow the schedule for any period") {
  const auto obj = make_objective("quadratic", 1);
  for (long period : {1L, 3L, 10L, 1000L}) {
    auto cfg = base_config();
    cfg.n_iterations = 37;
    cfg.record_every = period;
    cfg.n_samples = 16;
    const auto trace = run(obj, {0.5}, cfg);
    CHECK(static_cast<long>(trace.records.size()) ==
          expected_record_count(37, period));
    CHECK(trace.records.front().n == 1);
    CHECK(trace.records.back().n == 37);
  }
}

TEST_CASE("runs are bit-reproducible and thread-count invariant") {
  const auto obj = make_objective("noisy_quadratic", 3);
  auto cfg = base_config();
  cfg.smoother = SmootherKind::ExpSmooth;
  cfg.n_iterations = 20;
  cfg.n_samples = 256;
  cfg.target_ess = 128.0;
  cfg.master_seed = 77;
  const Point theta0{0.5, -0.5, 1.0};

  const auto a = run(obj, theta0, cfg);
  const auto b = run(obj, theta0, cfg);
  auto same = [](const RunTrace& x, const RunTrace& y) {
    REQUIRE(x.records.size() == y.records.size());
    CHECK(x.final_theta == y.final_theta);
    CHECK(x.running_min_grad_norm == y.running_min_grad_norm);
    for (std::size_t i = 0; i < x.records.size(); ++i) {
      CHECK(x.records[i].theta == y.records[i].theta);
      CHECK(x.records[i].grad_norm == y.records[i].grad_norm);
      CHECK(x.records[i].value == y.records[i].value);
      CHECK(x.records[i].ess == y.records[i].ess);
      CHECK(x.records[i].rescale_lambda == y.records[i].rescale_lambda);
    }
  };
  same(a, b);

  auto cfg4 = cfg;
  cfg4.n_threads = 4;
  same(a, run(obj, theta0, cfg4));
}

TEST_CASE("the exp-smoothed run with matched schedules is the posterior-mean recursion") {
  const auto obj = make_objective("noisy_quadratic", 2);
  const Schedule shared(0.6, 0.3);
  RunConfig cfg{shared, shared};
  cfg.smoother = SmootherKind::ExpSmooth;
  cfg.n_iterations = 40;
  cfg.n_samples = 128;
  cfg.master_seed = 5;
  cfg.record_every = 7;
  const Point theta0{1.5, -0.5};

  const auto a = run(obj, theta0, cfg);
  const auto b = moment_match_run(obj, theta0, shared, cfg.n_iterations,
                                  cfg.n_samples, cfg.master_seed,
                                  cfg.record_every);
  REQUIRE(a.records.size() == b.records.size());
  CHECK(a.final_theta == b.final_theta);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].n == b.records[i].n);
    CHECK(a.records[i].theta == b.records[i].theta);
    CHECK(a.records[i].grad_norm == b.records[i].grad_norm);
    CHECK(a.records[i].value == b.records[i].value);
    CHECK(a.records[i].ess == b.records[i].ess);
  }
}

TEST_CASE("one posterior-mean step lands on the closed-form tilted mean") {
  const auto obj = make_objective("quadratic", 2);
  const Point theta0{1.0, -2.0};
  // gamma = 0.5 tilts N(theta0, 0.5 I) by exp(-|x|^2/2): mean theta0 / 1.5.
  const auto trace =
      moment_match_run(obj, theta0, Schedule(0.5, 0.5), 1, 32768, 11);
  REQUIRE(trace.final_theta.size() == 2);
  CHECK(std::abs(trace.final_theta[0] - 2.0 / 3.0) < 0.05);
  CHECK(std::abs(trace.final_theta[1] + 4.0 / 3.0) < 0.05);
}

TEST_CASE("descent contracts the smooth objective toward its minimizer") {
  const auto obj = make_objective("quadratic", 2);
  auto cfg = base_config();
  cfg.n_iterations = 300;
  cfg.n_samples = 1024;
  cfg.record_every = 50;
  cfg.master_seed = 3;
  const Point theta0{1.0, -2.0};
  const auto trace = run(obj, theta0, cfg);

  double final_norm = 0.0;
  for (double v : trace.final_theta) final_norm += v * v;
  CHECK(std::sqrt(final_norm) < 0.1);
  CHECK(trace.records.back().value < trace.records.front().value);
  CHECK(trace.running_min_grad_norm < 0.1);

  double min_norm = trace.records.front().grad_norm;
  for (const auto& r : trace.records) min_norm = std::min(min_norm, r.grad_norm);
  CHECK(trace.running_min_grad_norm == min_norm);
}

TEST_CASE("failures carry the iteration that caused them") {
  auto count = std::make_shared<int>(0);
  NoisyObjective obj;
  obj.descriptor = "fragile";
  obj.dim = 1;
  obj.profile.deterministic = true;
  obj.evaluate = [count](std::span<const double>, const Noise&) {
    return ++*count > 40 ? std::nan("") : 1.0;
  };

  auto cfg = base_config();
  cfg.n_samples = 16;  // 17 evaluations per iteration
  cfg.n_threads = 1;
  try {
    run(obj, {0.0}, cfg);
    FAIL("expected an evaluation error");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("iteration 3") != std::string::npos);
  }
}

TEST_CASE("input mismatches are rejected before any work") {
  const auto obj = make_objective("quadratic", 2);
  const auto cfg = base_config();
  CHECK_THROWS_AS(run(obj, {0.0}, cfg), DimensionError);
  CHECK_THROWS_AS(run(obj, {0.0, std::nan("")}, cfg), EvaluationError);
  CHECK_THROWS_AS(moment_match_run(obj, {0.0}, Schedule(0.5, 0.5), 5, 64, 1),
                  DimensionError);
}

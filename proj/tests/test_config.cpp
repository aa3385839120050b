#include <doctest.h>

#include <fstream>
#include <string>

#include "mollify/config.hpp"

using namespace mollify;

namespace {

const char* kFullConfig = R"(# demo experiment
[objective]
descriptor = quadratic

[smoother]
kind = exp
target_ess = 512

; schedule scales and exponents
[schedules]
c_beta = 0.5
iota = 0.5
c_gamma = 0.5
kappa = 0.2

[run]
theta0 = 1.0, -2.0
n_iterations = 100
n_samples = 1024
master_seed = 42
record_every = 10
threads = 2
output = /tmp/trace.csv
summary = /tmp/summary.json
)";

}  // namespace

TEST_CASE("a full config parses field by field") {
  const auto cfg = parse_config(kFullConfig);
  CHECK(cfg.descriptor == std::optional<std::string>("quadratic"));
  CHECK_FALSE(cfg.dataset.has_value());
  CHECK(cfg.smoother_kind == "exp");
  CHECK(cfg.target_ess == std::optional<double>(512.0));
  CHECK(cfg.c_beta == 0.5);
  CHECK(cfg.iota == 0.5);
  CHECK(cfg.c_gamma == 0.5);
  CHECK(cfg.kappa == 0.2);
  CHECK(cfg.theta0 == std::vector<double>{1.0, -2.0});
  CHECK(cfg.n_iterations == 100);
  CHECK(cfg.n_samples == 1024);
  CHECK(cfg.master_seed == 42);
  CHECK(cfg.record_every == 10);
  CHECK(cfg.threads == 2);
  CHECK(cfg.output == "/tmp/trace.csv");
  CHECK(cfg.summary == std::optional<std::string>("/tmp/summary.json"));
}

TEST_CASE("optional keys fall back to defaults") {
  const auto cfg = parse_config(R"(
[objective]
descriptor = step
[smoother]
kind = mean
[schedules]
c_beta = 1.0
iota = 0.5
c_gamma = 1.0
kappa = 0.25
[run]
theta0 = 2.0
n_iterations = 50
n_samples = 256
master_seed = 7
output = out.csv
)");
  CHECK(cfg.record_every == 10);
  CHECK(cfg.threads == 1);
  CHECK_FALSE(cfg.target_ess.has_value());
  CHECK_FALSE(cfg.summary.has_value());
}

TEST_CASE("configs round-trip through serialization") {
  const auto cfg = parse_config(kFullConfig);
  const auto text = serialize_config(cfg);
  const auto again = parse_config(text);
  CHECK(again == cfg);
  CHECK(serialize_config(again) == text);
}

TEST_CASE("missing keys name themselves") {
  const std::string no_cbeta = R"(
[objective]
descriptor = quadratic
[smoother]
kind = mean
[schedules]
iota = 0.5
c_gamma = 1.0
kappa = 0.25
[run]
theta0 = 1.0
n_iterations = 10
n_samples = 64
master_seed = 1
output = out.csv
)";
  try {
    parse_config(no_cbeta);
    FAIL("expected a missing-key error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("c_beta") != std::string::npos);
  }
}

TEST_CASE("unknown, duplicate, and misplaced keys are parse errors") {
  std::string with_unknown(kFullConfig);
  with_unknown += "\n[extra]\nmystery = 1\n";
  CHECK_THROWS_AS(parse_config(with_unknown), ParseError);

  std::string with_duplicate(kFullConfig);
  with_duplicate += "\n[schedules]\n";
  CHECK_THROWS_AS(parse_config(with_duplicate + "c_beta = 0.7\n"), ParseError);

  CHECK_THROWS_AS(parse_config("orphan = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[broken\nkey = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[run]\nno equals sign here\n"), ParseError);
}

TEST_CASE("bad values carry their line number") {
  const std::string bad = R"([objective]
descriptor = quadratic
[smoother]
kind = mean
[schedules]
c_beta = not_a_number
iota = 0.5
c_gamma = 1.0
kappa = 0.25
[run]
theta0 = 1.0
n_iterations = 10
n_samples = 64
master_seed = 1
output = out.csv
)";
  try {
    parse_config(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("c_beta") != std::string::npos);
    CHECK(msg.find("6") != std::string::npos);
  }
}

TEST_CASE("exactly one objective source is required") {
  std::string both(kFullConfig);
  both += "\n[objective]\n";
  CHECK_THROWS_AS(parse_config(both + "dataset = d.csv\n"), Error);

  const std::string neither = R"(
[objective]
[smoother]
kind = mean
[schedules]
c_beta = 1.0
iota = 0.5
c_gamma = 1.0
kappa = 0.25
[run]
theta0 = 1.0
n_iterations = 10
n_samples = 64
master_seed = 1
output = out.csv
)";
  CHECK_THROWS_AS(parse_config(neither), Error);
}

TEST_CASE("smoother kinds are the two implemented ones") {
  CHECK(parse_smoother("mean") == SmootherKind::MeanSmooth);
  CHECK(parse_smoother("exp") == SmootherKind::ExpSmooth);
  CHECK_THROWS_AS(parse_smoother("median"), Error);
}

TEST_CASE("experiments build from descriptor configs") {
  const auto exp = build_experiment(parse_config(kFullConfig));
  CHECK(exp.objective.descriptor == "quadratic");
  CHECK(exp.objective.dim == 2);
  CHECK(exp.theta0 == std::vector<double>{1.0, -2.0});
  CHECK(exp.run.beta.value(1) == 0.5);
  CHECK(exp.run.gamma.value(1) == 0.5);
  CHECK(exp.run.smoother == SmootherKind::ExpSmooth);
  CHECK(exp.run.target_ess == std::optional<double>(512.0));
  CHECK(exp.run.n_iterations == 100);
  CHECK(exp.run.master_seed == 42);
  CHECK_FALSE(exp.data.has_value());
}

TEST_CASE("experiments build from dataset configs") {
  const std::string csv_path = "/tmp/config_dataset.csv";
  {
    std::ofstream out(csv_path);
    out << "1,2.0,0.1\n1,1.5,0.2\n-1,-2.0,0.0\n-1,-1.0,0.3\n";
  }
  const std::string text = std::string(R"(
[objective]
dataset = )") + csv_path + R"(
n_batch = 8
[smoother]
kind = exp
[schedules]
c_beta = 0.2
iota = 0.5
c_gamma = 0.2
kappa = 0.2
[run]
theta0 = 0.5
n_iterations = 20
n_samples = 64
master_seed = 3
output = out.csv
)";
  const auto exp = build_experiment(parse_config(text));
  CHECK(exp.objective.descriptor == "auc");
  CHECK(exp.objective.dim == 1);
  REQUIRE(exp.data.has_value());
  CHECK(exp.data->n_data() == 4);

  // theta0 must live in R^{p-1}.
  auto cfg = parse_config(text);
  cfg.theta0 = {0.5, 0.5};
  CHECK_THROWS_AS(build_experiment(cfg), Error);
}

TEST_CASE("experiment building validates the resolved pieces") {
  auto cfg = parse_config(kFullConfig);
  cfg.descriptor = "no_such_objective";
  CHECK_THROWS_AS(build_experiment(cfg), Error);

  cfg = parse_config(kFullConfig);
  cfg.iota = 1.5;
  CHECK_THROWS_AS(build_experiment(cfg), Error);

  cfg = parse_config(kFullConfig);
  cfg.n_samples = 1;
  CHECK_THROWS_AS(build_experiment(cfg), Error);

  cfg = parse_config(kFullConfig);
  cfg.target_ess = 2048.0;
  CHECK_THROWS_AS(build_experiment(cfg), Error);
}

TEST_CASE("loading reports missing files") {
  CHECK_THROWS_AS(load_config("/tmp/definitely_missing_config.ini"), Error);

  const std::string path = "/tmp/config_load_test.ini";
  {
    std::ofstream out(path);
    out << kFullConfig;
  }
  CHECK(load_config(path) == parse_config(kFullConfig));
}

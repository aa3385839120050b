#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using std::string;

namespace {

struct CliResult {
  int code = -1;
  string out;
};

CliResult run_cli(const string& args, const string& env_prefix = "") {
  const string capture = "/tmp/cli_capture.txt";
  const string cmd =
      env_prefix + " " + MOLLIFY_CLI_PATH + " " + args + " > " + capture + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture);
  std::stringstream buf;
  buf << in.rdbuf();
  result.out = buf.str();
  return result;
}

string slurp(const string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const string& path, const string& body) {
  std::ofstream out(path);
  out << body;
}

string demo_config(const string& trace_path, const string& summary_path) {
  return string("[objective]\n"
                "descriptor = quadratic\n"
                "[smoother]\n"
                "kind = exp\n"
                "target_ess = 32\n"
                "[schedules]\n"
                "c_beta = 0.5\n"
                "iota = 0.5\n"
                "c_gamma = 0.5\n"
                "kappa = 0.2\n"
                "[run]\n"
                "theta0 = 1.0, -2.0\n"
                "n_iterations = 30\n"
                "n_samples = 64\n"
                "master_seed = 42\n"
                "record_every = 10\n"
                "output = ") +
         trace_path + "\nsummary = " + summary_path + "\n";
}

int count_lines(const string& text) {
  int lines = 0;
  for (char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

}  // namespace

TEST_CASE("run executes a config and writes trace plus summary") {
  const string config = "/tmp/cli_demo.ini";
  const string trace = "/tmp/cli_demo_trace.csv";
  const string summary = "/tmp/cli_demo_summary.json";
  write_file(config, demo_config(trace, summary));

  const auto result = run_cli("run " + config);
  CHECK(result.code == 0);
  CHECK(result.out.find("records") != string::npos);

  const string trace_text = slurp(trace);
  // Header plus records at 1, 10, 20, 30.
  CHECK(count_lines(trace_text) == 5);
  CHECK(trace_text.rfind("n,beta,gamma,value,grad_norm,ess,lambda,theta_0,theta_1\n", 0) == 0);

  const string summary_text = slurp(summary);
  CHECK(summary_text.find("\"verdict\"") != string::npos);
  CHECK(summary_text.find("\"running_min_grad_norm\"") != string::npos);
}

TEST_CASE("run output is byte-stable across reruns and thread counts") {
  const string config = "/tmp/cli_stable.ini";
  const string trace = "/tmp/cli_stable_trace.csv";
  write_file(config, demo_config(trace, "/tmp/cli_stable_summary.json"));

  REQUIRE(run_cli("run " + config).code == 0);
  const string first = slurp(trace);
  REQUIRE(run_cli("run " + config).code == 0);
  CHECK(slurp(trace) == first);

  REQUIRE(run_cli("run " + config, "MOLLIFY_THREADS=4").code == 0);
  CHECK(slurp(trace) == first);
}

TEST_CASE("run distinguishes config errors from runtime errors") {
  CHECK(run_cli("run /tmp/no_such_config.ini").code == 2);

  const string bad = "/tmp/cli_bad.ini";
  write_file(bad, "[objective]\ndescriptor = quadratic\nmystery = 1\n");
  CHECK(run_cli("run " + bad).code == 2);

  const string unwritable = "/tmp/cli_unwritable.ini";
  write_file(unwritable, demo_config("/no_such_dir/trace.csv",
                                     "/no_such_dir/summary.json"));
  const auto result = run_cli("run " + unwritable);
  CHECK(result.code == 3);

  const string bad_env = "/tmp/cli_env.ini";
  write_file(bad_env, demo_config("/tmp/cli_env_trace.csv",
                                  "/tmp/cli_env_summary.json"));
  CHECK(run_cli("run " + bad_env, "MOLLIFY_THREADS=abc").code == 2);
}

TEST_CASE("schedule validation maps verdicts to exit codes") {
  auto r = run_cli("validate-schedules --iota 0.5 --kappa 0.2 --alpha 0");
  CHECK(r.code == 0);
  CHECK(r.out.find("FullConvergence") != string::npos);

  r = run_cli("validate-schedules --iota 0.3 --kappa 0.2 --alpha 0");
  CHECK(r.code == 1);
  CHECK(r.out.find("NoGuarantee") != string::npos);

  r = run_cli("validate-schedules --iota 0.55 --kappa 0.2 --alpha 0 --eta 4");
  CHECK(r.code == 0);
  CHECK(r.out.find("SubsequenceOnly") != string::npos);

  // Deterministic boundary: the exp smoother has a known threshold constant.
  r = run_cli("validate-schedules --iota 0.2 --kappa 0.4 --alpha 1 "
              "--mode deterministic --smoother exp --c-beta 1 --c-gamma 1");
  CHECK(r.code == 0);
  CHECK(r.out.find("BoundaryCaseNeedsConstant") != string::npos);

  r = run_cli("validate-schedules --iota 0.2 --kappa 0.4 --alpha 1 "
              "--mode deterministic --smoother mean --c-beta 1 --c-gamma 1");
  CHECK(r.code == 1);
  CHECK(r.out.find("BoundaryCaseNeedsConstant") != string::npos);

  CHECK(run_cli("validate-schedules --iota 1.5 --kappa 0.2").code == 2);
  CHECK(run_cli("validate-schedules --kappa 0.2").code == 2);
}

TEST_CASE("oracle comparison passes on a smooth objective") {
  const auto r = run_cli(
      "oracle-check --objective quadratic --dim 1 --gamma 1.0 --n-samples 4000");
  CHECK(r.code == 0);
  CHECK(r.out.find("max deviation") != string::npos);
}

TEST_CASE("oracle comparison rejects dimensions beyond the quadrature range") {
  CHECK(run_cli("oracle-check --objective quadratic --dim 5").code == 3);
  CHECK(run_cli("oracle-check --objective no_such --dim 1").code == 2);
}

TEST_CASE("the ranking demo runs end to end") {
  const string trace = "/tmp/cli_auc_trace.csv";
  const string summary = "/tmp/cli_auc_summary.json";
  const auto r = run_cli(
      "auc-demo --p 3 --n-data 40 --n-batch 8 --n-iterations 30 "
      "--n-samples 128 --record-every 10 --output " +
      trace + " --summary " + summary);
  CHECK(r.code == 0);
  CHECK(r.out.find("final risk") != string::npos);
  CHECK(slurp(summary).find("\"final_risk\"") != string::npos);
  CHECK(count_lines(slurp(trace)) == 5);
}

TEST_CASE("bad invocations exit with the usage code") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("run").code == 2);
}

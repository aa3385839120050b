#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "mollify/auc.hpp"
#include "mollify/config.hpp"
#include "mollify/objectives.hpp"
#include "mollify/optimizer.hpp"
#include "mollify/oracle.hpp"
#include "mollify/trace_io.hpp"

namespace py = pybind11;
using namespace mollify;

namespace {

SmootherKind smoother_from_name(const std::string& name) {
  return parse_smoother(name);
}

/// Noise for one estimate, addressed the same way run() addresses it.
Noise noise_for(const NoisyObjective& obj, std::uint64_t seed,
                std::uint64_t iteration) {
  RngStream rng = substream(seed, StreamTag::kNoise, iteration);
  return obj.draw_noise(rng);
}

GradEstimate py_grad_mean(const NoisyObjective& obj,
                          const std::vector<double>& theta, double gamma,
                          int n_samples, std::uint64_t seed,
                          std::uint64_t iteration, int n_threads) {
  const Noise u = noise_for(obj, seed, iteration);
  return grad_mean_smooth(obj, theta, gamma, u, n_samples,
                          SampleStreams{seed, iteration}, n_threads);
}

GradEstimate py_grad_exp(const NoisyObjective& obj,
                         const std::vector<double>& theta, double gamma,
                         int n_samples, std::optional<double> target_ess,
                         std::uint64_t seed, std::uint64_t iteration,
                         int n_threads) {
  const Noise u = noise_for(obj, seed, iteration);
  return grad_exp_smooth(obj, theta, gamma, u, n_samples, target_ess,
                         SampleStreams{seed, iteration}, n_threads);
}

ScalarField field_from_python(const py::function& f) {
  return [f](std::span<const double> x) {
    const std::vector<double> arg(x.begin(), x.end());
    return f(arg).cast<double>();
  };
}

py::dict record_to_dict(const TraceRecord& r) {
  py::dict d;
  d["n"] = r.n;
  d["theta"] = r.theta;
  d["beta"] = r.beta_n;
  d["gamma"] = r.gamma_n;
  d["grad_norm"] = r.grad_norm;
  d["value"] = r.value;
  d["ess"] = r.ess;
  d["lambda"] = r.rescale_lambda;
  return d;
}

py::dict trace_to_dict(const RunTrace& trace) {
  py::list records;
  for (const TraceRecord& r : trace.records) records.append(record_to_dict(r));
  py::dict d;
  d["records"] = records;
  d["final_theta"] = trace.final_theta;
  d["running_min_grad_norm"] = trace.running_min_grad_norm;
  return d;
}

py::dict py_run(const NoisyObjective& obj, const std::vector<double>& theta0,
                const std::string& smoother, double c_beta, double iota,
                double c_gamma, double kappa, long n_iterations, int n_samples,
                std::optional<double> target_ess, std::uint64_t seed,
                long record_every, int n_threads) {
  RunConfig cfg{Schedule(c_beta, iota), Schedule(c_gamma, kappa)};
  cfg.smoother = smoother_from_name(smoother);
  cfg.n_iterations = n_iterations;
  cfg.n_samples = n_samples;
  cfg.target_ess = target_ess;
  cfg.master_seed = seed;
  cfg.record_every = record_every;
  cfg.n_threads = n_threads;
  return trace_to_dict(run(obj, theta0, cfg));
}

py::dict py_validate(double iota, double kappa, double alpha, double eta,
                     const std::string& mode, const std::string& smoother,
                     double c_beta, double c_gamma) {
  RegularityProfile profile;
  profile.alpha = alpha;
  profile.eta = eta;
  if (mode != "stochastic" && mode != "deterministic") {
    throw Error("mode must be 'stochastic' or 'deterministic'");
  }
  profile.deterministic = mode == "deterministic";
  const auto verdict = validate_schedules(
      iota, kappa, profile,
      profile.deterministic ? ScheduleMode::Deterministic
                            : ScheduleMode::Stochastic,
      c_beta, c_gamma, smoother_from_name(smoother));
  py::dict d;
  d["level"] = std::string(to_string(verdict.level));
  d["reasons"] = verdict.reasons;
  if (verdict.c_star_used) {
    d["c_star_used"] = *verdict.c_star_used;
  } else {
    d["c_star_used"] = py::none();
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_mollify, m) {
  m.doc() = "Gradient-free optimization of noisy, discontinuous objectives "
            "via Gaussian smoothing";

  py::register_exception<Error>(m, "MollifyError", PyExc_RuntimeError);

  py::class_<NoisyObjective>(m, "Objective")
      .def_property_readonly("descriptor",
                             [](const NoisyObjective& o) { return o.descriptor; })
      .def_property_readonly("dim", [](const NoisyObjective& o) { return o.dim; })
      .def_property_readonly("lower_bound",
                             [](const NoisyObjective& o) { return o.lower_bound; })
      .def_property_readonly(
          "alpha", [](const NoisyObjective& o) { return o.profile.alpha; })
      .def_property_readonly(
          "deterministic",
          [](const NoisyObjective& o) { return o.profile.deterministic; })
      .def("__call__",
           [](const NoisyObjective& o, const std::vector<double>& theta) {
             return o(theta, Noise{});
           },
           py::arg("theta"),
           "Evaluate at theta with an empty noise token.")
      .def("__repr__", [](const NoisyObjective& o) {
        return "<Objective '" + o.descriptor + "' dim=" + std::to_string(o.dim) +
               ">";
      });

  py::class_<GradEstimate>(m, "GradEstimate")
      .def_readonly("gradient", &GradEstimate::gradient)
      .def_readonly("std_error", &GradEstimate::std_error)
      .def_readonly("posterior_mean", &GradEstimate::posterior_mean)
      .def_readonly("value_estimate", &GradEstimate::value_estimate)
      .def_readonly("ess", &GradEstimate::ess)
      .def_readonly("rescale_lambda", &GradEstimate::rescale_lambda)
      .def_readonly("n_samples", &GradEstimate::n_samples)
      .def("__repr__", [](const GradEstimate& e) {
        return "<GradEstimate n_samples=" + std::to_string(e.n_samples) +
               " ess=" + std::to_string(e.ess) + ">";
      });

  m.def("make_objective", &make_objective, py::arg("descriptor"),
        py::arg("dim"),
        "Build a named test objective ('quadratic', 'step', 'step_quad', "
        "'noisy_quadratic', 'staircase').");
  m.def("corpus_descriptors", []() {
    std::vector<std::string> names;
    for (const auto& obj : builtin_corpus()) names.push_back(obj.descriptor);
    return names;
  });

  m.def("grad_mean_smooth", &py_grad_mean, py::arg("objective"),
        py::arg("theta"), py::arg("gamma"), py::arg("n_samples") = 1024,
        py::arg("seed") = 0, py::arg("iteration") = 1, py::arg("threads") = 1,
        "Monte-Carlo gradient of the Gaussian-convolved loss.");
  m.def("grad_exp_smooth", &py_grad_exp, py::arg("objective"), py::arg("theta"),
        py::arg("gamma"), py::arg("n_samples") = 1024,
        py::arg("target_ess") = py::none(), py::arg("seed") = 0,
        py::arg("iteration") = 1, py::arg("threads") = 1,
        "Importance-sampling gradient of the entropic surrogate.");

  m.def("ess",
        [](const std::vector<double>& w) { return ess(w); },
        py::arg("weights"), "(sum w)^2 / sum w^2.");
  m.def("normalized_weights",
        [](const std::vector<double>& losses, double lambda) {
          return normalized_weights(losses, lambda);
        },
        py::arg("losses"), py::arg("lambda_") = 1.0);
  m.def("rescale_to_target_ess",
        [](const std::vector<double>& losses, double target, double tol) {
          return rescale_to_target_ess(losses, target, tol);
        },
        py::arg("losses"), py::arg("target_ess"), py::arg("tol") = 1e-6);

  m.def("run", &py_run, py::arg("objective"), py::arg("theta0"),
        py::arg("smoother") = "mean", py::arg("c_beta") = 0.5,
        py::arg("iota") = 0.5, py::arg("c_gamma") = 0.5, py::arg("kappa") = 0.2,
        py::arg("n_iterations") = 100, py::arg("n_samples") = 1024,
        py::arg("target_ess") = py::none(), py::arg("seed") = 0,
        py::arg("record_every") = 10, py::arg("threads") = 1,
        "Run the descent recursion; returns records, final_theta, and the "
        "running minimum gradient norm.");

  m.def("validate_schedules", &py_validate, py::arg("iota"), py::arg("kappa"),
        py::arg("alpha") = 1.0,
        py::arg("eta") = std::numeric_limits<double>::infinity(),
        py::arg("mode") = "stochastic", py::arg("smoother") = "exp",
        py::arg("c_beta") = 1.0, py::arg("c_gamma") = 1.0,
        "Check schedule exponents against the convergence conditions.");

  m.def("oracle_mean_value",
        [](const py::function& f, const std::vector<double>& theta,
           double gamma) {
          const auto spec = QuadratureSpec::defaults(static_cast<int>(theta.size()));
          return oracle_mean_value(field_from_python(f), theta, gamma, spec);
        },
        py::arg("f"), py::arg("theta"), py::arg("gamma"),
        "Quadrature value of the Gaussian-convolved f (dim <= 3).");
  m.def("oracle_mean_grad",
        [](const py::function& f, const std::vector<double>& theta,
           double gamma) {
          const auto spec = QuadratureSpec::defaults(static_cast<int>(theta.size()));
          return oracle_mean_grad(field_from_python(f), theta, gamma, spec);
        },
        py::arg("f"), py::arg("theta"), py::arg("gamma"));
  m.def("oracle_exp_value",
        [](const py::function& f, const std::vector<double>& theta,
           double gamma) {
          const auto spec = QuadratureSpec::defaults(static_cast<int>(theta.size()));
          return oracle_exp_value(field_from_python(f), theta, gamma, spec);
        },
        py::arg("f"), py::arg("theta"), py::arg("gamma"));
  m.def("oracle_exp_grad",
        [](const py::function& f, const std::vector<double>& theta,
           double gamma) {
          const auto spec = QuadratureSpec::defaults(static_cast<int>(theta.size()));
          return oracle_exp_grad(field_from_python(f), theta, gamma, spec);
        },
        py::arg("f"), py::arg("theta"), py::arg("gamma"));

  m.def("make_blobs",
        [](int p, int n_data, std::uint64_t data_seed, double center_scale,
           double noise_sd) {
          const Dataset data =
              make_blobs(p, n_data, data_seed, center_scale, noise_sd);
          py::dict d;
          d["features"] = data.features;
          d["labels"] = data.labels;
          d["n_plus"] = data.n_plus;
          return d;
        },
        py::arg("p"), py::arg("n_data"), py::arg("data_seed"),
        py::arg("center_scale") = 2.0, py::arg("noise_sd") = 0.5);
  m.def("empirical_auc_risk",
        [](const std::vector<double>& v,
           const std::vector<std::vector<double>>& features,
           const std::vector<int>& labels) {
          return empirical_auc_risk(v, make_dataset(features, labels));
        },
        py::arg("v"), py::arg("features"), py::arg("labels"),
        "Fraction of positive-negative pairs misordered by the direction v.");
  m.def("stereographic",
        [](const std::vector<double>& v) { return stereographic(v); },
        py::arg("v"));
  m.def("stereographic_inverse",
        [](const std::vector<double>& theta) {
          return stereographic_inverse(theta);
        },
        py::arg("theta"));
}

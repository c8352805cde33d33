#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "odefilter/diagnostics.hpp"
#include "odefilter/error.hpp"
#include "odefilter/experiments.hpp"
#include "odefilter/filter.hpp"
#include "odefilter/noise.hpp"
#include "odefilter/prior.hpp"
#include "odefilter/problems.hpp"
#include "odefilter/steady_state.hpp"

namespace py = pybind11;
using namespace odefilter;

namespace {

PriorSpec make_prior(int q, double sigma, const std::string& kind, double theta) {
  PriorSpec p;
  p.q = q;
  p.sigma = sigma;
  p.kind = parse_prior_kind(kind);
  p.theta = theta;
  p.validate();
  return p;
}

py::dict steady_dict(const SteadyState& s) {
  py::dict d;
  d["h"] = s.h;
  d["sigma"] = s.sigma;
  d["R"] = s.R;
  d["P11_pred"] = s.P11_pred;
  d["P11"] = s.P11;
  d["P01_pred"] = s.P01_pred;
  d["P01"] = s.P01;
  d["beta0"] = s.beta0;
  d["beta1"] = s.beta1;
  return d;
}

py::dict solve_py(const std::string& problem_name, int q, double sigma, double h,
                  const std::string& noise, const std::string& prior, double theta,
                  const std::string& init, std::uint64_t seed) {
  const IVProblem problem = problem_by_name(problem_name);
  const PriorSpec spec = make_prior(q, sigma, prior, theta);
  const NoiseModel model = resolve_noise(noise, q);
  const InitMode mode = parse_init_mode(init, seed);
  Trajectory traj;
  {
    py::gil_scoped_release release;
    traj = solve(problem, spec, h, model, mode);
  }
  const auto n = static_cast<py::ssize_t>(traj.steps() + 1);
  const py::ssize_t rows = q + 1;
  const py::ssize_t d = problem.d;
  py::array_t<double> t(n);
  py::array_t<double> mean({n, rows, d});
  py::array_t<double> std_dev({n, d});
  auto tv = t.mutable_unchecked<1>();
  auto mv = mean.mutable_unchecked<3>();
  auto sv = std_dev.mutable_unchecked<2>();
  for (py::ssize_t k = 0; k < n; ++k) {
    const Belief b = traj.belief(static_cast<std::size_t>(k));
    tv(k) = b.t;
    for (py::ssize_t j = 0; j < d; ++j) {
      for (py::ssize_t i = 0; i < rows; ++i) {
        mv(k, i, j) = b.m(i, j);
      }
      const Matrix& P = b.P.size() == 1 ? b.P.front() : b.P[static_cast<std::size_t>(j)];
      sv(k, j) = std::sqrt(std::max(P(0, 0), 0.0));
    }
  }
  py::dict out;
  out["t"] = t;
  out["mean"] = mean;
  out["std"] = std_dev;
  out["diverged"] = traj.diverged;
  out["R"] = traj.config.R;
  out["delta1"] = misalignment(traj, problem, 1);
  if (problem.has_exact()) {
    out["error"] = global_error(traj, problem).eps0_norm;
  } else {
    out["error"] = py::none();
  }
  return out;
}

py::tuple run_cli_py(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = run_cli(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gaussian ODE filters with integrated Wiener and OU priors";

  // Messages start with the error code name, e.g. "NonIntegerMesh: ...".
  py::register_exception<Error>(m, "OdefilterError", PyExc_RuntimeError);

  m.def(
      "transition",
      [](int q, double sigma, double h, const std::string& prior, double theta) {
        const TransitionModel tm = transition(make_prior(q, sigma, prior, theta), h);
        return py::make_tuple(tm.A, tm.Q);
      },
      py::arg("q"), py::arg("sigma"), py::arg("h"), py::arg("prior") = "ibm",
      py::arg("theta") = 0.0, "Closed-form (A, Q) over a step h.");
  m.def(
      "transition_oracle",
      [](const Matrix& F, const Vector& L, double sigma, double h) {
        const TransitionModel tm = transition_oracle(F, L, sigma, h);
        return py::make_tuple(tm.A, tm.Q);
      },
      py::arg("F"), py::arg("L"), py::arg("sigma"), py::arg("h"),
      "(A, Q) of dX = F X dt + sigma L dB via matrix exponentials.");
  m.def(
      "drift_matrix",
      [](int q, const std::string& prior, double theta) {
        return drift_matrix(make_prior(q, 1.0, prior, theta));
      },
      py::arg("q"), py::arg("prior") = "ibm", py::arg("theta") = 0.0);

  m.def("closed_form", [](double h, double sigma, double R) { return steady_dict(closed_form(h, sigma, R)); },
        py::arg("h"), py::arg("sigma"), py::arg("R"));
  m.def(
      "orbit_limit",
      [](double h, double sigma, double R) {
        const OrbitLimit lim = orbit_limit(h, sigma, R);
        py::dict d = steady_dict(lim.state);
        d["iterations"] = lim.iterations;
        d["converged"] = lim.converged;
        return d;
      },
      py::arg("h"), py::arg("sigma"), py::arg("R"));
  m.def("predicted_exponents", &predicted_exponents, py::arg("p"));
  m.def(
      "verify_order_bounds",
      [](const std::vector<double>& grid, double sigma, double p, double K_R, double T) {
        const OrderBoundReport rep = verify_order_bounds(grid, sigma, p, K_R, T);
        py::list out;
        for (const OrderBoundQuantity& q : rep.quantities) {
          py::dict d;
          d["name"] = q.name;
          d["predicted"] = q.predicted;
          d["fitted"] = q.fitted;
          d["exact_zero"] = q.exact_zero;
          d["max_values"] = q.max_values;
          out.append(d);
        }
        return out;
      },
      py::arg("h_grid"), py::arg("sigma"), py::arg("p"), py::arg("K_R"), py::arg("T") = 1.0);

  m.def("solve", &solve_py, py::arg("problem"), py::arg("q") = 1, py::arg("sigma") = 1.0,
        py::arg("h") = 0.01, py::arg("noise") = "zero", py::arg("prior") = "ibm",
        py::arg("theta") = 0.0, py::arg("init") = "exact", py::arg("seed") = 0,
        "Runs the filter on a built-in problem. Returns t, mean[n, i, j], std[n, j], "
        "delta1, error (None without a closed form) and diverged.");
  m.def("problem_names", &problem_names);

  m.def(
      "fit_order",
      [](const std::vector<double>& h, const std::vector<double>& err, int drop_largest,
         double min_span) {
        const OrderFit f = fit_order(h, err, drop_largest, min_span);
        py::dict d;
        d["slope"] = f.slope;
        d["intercept"] = f.intercept;
        d["r_squared"] = f.r_squared;
        d["exact_zero"] = f.exact_zero;
        return d;
      },
      py::arg("h"), py::arg("errors"), py::arg("drop_largest") = 1, py::arg("min_span") = 10.0);

  m.def(
      "noise_value", [](const std::string& spec, double h) { return NoiseModel::parse(spec).evaluate(h); },
      py::arg("spec"), py::arg("h"));
  m.def(
      "noise_permissible",
      [](const std::string& spec, int q) { return resolve_noise(spec, q).is_permissible(q); },
      py::arg("spec"), py::arg("q"));

  m.def("run_cli", &run_cli_py, py::arg("args"),
        "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}

#include "odefilter/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "odefilter/error.hpp"
#include "odefilter/format.hpp"

namespace odefilter {
namespace {

constexpr int kPolynomialDerivativeOrder = 6;

// Dense univariate polynomial, coefficient k multiplies x^k.
using Poly = std::vector<double>;

Poly multiply(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

Poly differentiate(const Poly& a) {
  if (a.size() <= 1) {
    return {0.0};
  }
  Poly out(a.size() - 1);
  for (std::size_t k = 1; k < a.size(); ++k) {
    out[k - 1] = static_cast<double>(k) * a[k];
  }
  return out;
}

double evaluate(const Poly& a, double x) {
  double acc = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

VectorField scalar_poly_field(Poly p) {
  return [p = std::move(p)](const Vector& x) {
    Vector out(1);
    out(0) = evaluate(p, x(0));
    return out;
  };
}

// g^(0) = x, g^(1) = f, g^(i) = g^(i-1)' f for a scalar polynomial field.
std::vector<VectorField> polynomial_total_derivatives(const Poly& f, int order) {
  std::vector<VectorField> out;
  Poly g = {0.0, 1.0};
  out.push_back(scalar_poly_field(g));
  g = f;
  for (int i = 1; i <= order; ++i) {
    out.push_back(scalar_poly_field(g));
    g = multiply(differentiate(g), f);
  }
  return out;
}

Vector rk4_step(const VectorField& f, const Vector& x, double h) {
  const Vector k1 = f(x);
  const Vector k2 = f(x + 0.5 * h * k1);
  const Vector k3 = f(x + 0.5 * h * k2);
  const Vector k4 = f(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<Vector> rk4_nodes(const IVProblem& problem, long steps) {
  const double h = problem.T / static_cast<double>(steps);
  std::vector<Vector> states;
  states.reserve(static_cast<std::size_t>(steps) + 1);
  states.push_back(problem.x0);
  for (long n = 0; n < steps; ++n) {
    states.push_back(rk4_step(problem.f, states.back(), h));
  }
  return states;
}

}  // namespace

Vector IVProblem::derivative(int i, const Vector& x) const {
  if (i < 0 || i > max_derivative()) {
    throw Error(ErrorCode::MissingDerivative,
                "problem '" + name + "' has no total derivative of order " + std::to_string(i));
  }
  return derivatives[static_cast<std::size_t>(i)](x);
}

Vector IVProblem::exact_derivative(int i, double t) const {
  if (!has_exact()) {
    throw Error(ErrorCode::MissingExact, "problem '" + name + "' has no closed-form solution");
  }
  return derivative(i, exact(t));
}

IVProblem logistic(double lambda0, double lambda1, double x0, double T) {
  IVProblem p;
  p.name = "logistic";
  p.d = 1;
  // lambda0 x - (lambda0/lambda1) x^2
  const Poly f = {0.0, lambda0, -lambda0 / lambda1};
  p.f = scalar_poly_field(f);
  p.derivatives = polynomial_total_derivatives(f, kPolynomialDerivativeOrder);
  p.x0 = Vector::Constant(1, x0);
  p.T = T;
  p.exact = [=](double t) {
    const double e = std::exp(lambda0 * t);
    Vector out(1);
    out(0) = lambda1 * x0 * e / (lambda1 + x0 * (e - 1.0));
    return out;
  };
  p.params = "lambda0=" + format_shortest(lambda0) + ";lambda1=" + format_shortest(lambda1);
  return p;
}

IVProblem linear_rotation() {
  using std::numbers::pi;
  IVProblem p;
  p.name = "linear";
  p.d = 2;
  Matrix lambda(2, 2);
  lambda << 0.0, -pi, pi, 0.0;
  p.f = [lambda](const Vector& x) -> Vector { return lambda * x; };
  Matrix power = Matrix::Identity(2, 2);
  for (int i = 0; i <= kPolynomialDerivativeOrder; ++i) {
    p.derivatives.push_back([power](const Vector& x) -> Vector { return power * x; });
    power = lambda * power;
  }
  p.x0 = Vector(2);
  p.x0 << 0.0, 1.0;
  p.T = 10.0;
  p.exact = [](double t) {
    Vector out(2);
    out << -std::sin(pi * t), std::cos(pi * t);
    return out;
  };
  p.params = "Lambda=[[0,-pi],[pi,0]]";
  return p;
}

IVProblem riccati() {
  IVProblem p;
  p.name = "riccati";
  p.d = 1;
  const Poly f = {0.0, 0.0, 0.0, -0.5};
  p.f = scalar_poly_field(f);
  p.derivatives = polynomial_total_derivatives(f, kPolynomialDerivativeOrder);
  p.x0 = Vector::Constant(1, 1.0);
  p.T = 1.0;
  p.exact = [](double t) { return Vector::Constant(1, 1.0 / std::sqrt(t + 1.0)); };
  p.params = "f=-x^3/2";
  return p;
}

IVProblem constant_field(const Vector& c, const Vector& x0, double T) {
  if (c.size() != x0.size()) {
    throw Error(ErrorCode::DimensionMismatch, "constant field and initial value differ in size");
  }
  IVProblem p;
  p.name = "constant";
  p.d = static_cast<int>(c.size());
  p.f = [c](const Vector&) -> Vector { return c; };
  p.derivatives.push_back([](const Vector& x) -> Vector { return x; });
  p.derivatives.push_back(p.f);
  for (int i = 2; i <= kPolynomialDerivativeOrder; ++i) {
    p.derivatives.push_back([d = c.size()](const Vector&) -> Vector { return Vector::Zero(d); });
  }
  p.x0 = x0;
  p.T = T;
  p.exact = [c, x0](double t) -> Vector { return x0 + t * c; };
  p.params = "c=" + format_shortest(c(0));
  return p;
}

IVProblem problem_by_name(std::string_view name) {
  if (name == "logistic") {
    return logistic();
  }
  if (name == "linear") {
    return linear_rotation();
  }
  if (name == "riccati") {
    return riccati();
  }
  if (name == "constant") {
    return constant_field(Vector::Constant(1, 1.0), Vector::Constant(1, 0.0), 1.0);
  }
  throw Error(ErrorCode::ConfigError, "unknown problem '" + std::string(name) + "'");
}

std::vector<std::string> problem_names() { return {"logistic", "linear", "riccati", "constant"}; }

double validate_problem(const IVProblem& problem, int probes, double tol) {
  double worst = 0.0;
  const double step = 1e-3 * std::min(problem.T, 1.0);
  for (int k = 0; k < probes; ++k) {
    // Interior probes so the five-point stencil stays inside [0, T].
    const double t = 2.0 * step + (problem.T - 4.0 * step) * k / std::max(probes - 1, 1);
    const Vector x = problem.has_exact() ? problem.exact(t) : problem.x0;
    const Vector fx = problem.f(x);
    const Vector g1 = problem.derivative(1, x);
    worst = std::max(worst, (g1 - fx).cwiseAbs().maxCoeff());
    if (problem.has_exact()) {
      const Vector fd = (-problem.exact(t + 2 * step) + 8.0 * problem.exact(t + step) -
                         8.0 * problem.exact(t - step) + problem.exact(t - 2 * step)) /
                        (12.0 * step);
      const double scale = std::max(1.0, fx.cwiseAbs().maxCoeff());
      worst = std::max(worst, (fd - fx).cwiseAbs().maxCoeff() / scale);
    }
  }
  if (worst > tol) {
    throw Error(ErrorCode::InvalidArgument, "problem '" + problem.name +
                                                "' failed validation, residual " +
                                                format_shortest(worst));
  }
  return worst;
}

ReferenceSolution::ReferenceSolution(std::vector<double> times, std::vector<Vector> states,
                                     std::vector<Vector> slopes, double error_estimate)
    : times_(std::move(times)),
      states_(std::move(states)),
      slopes_(std::move(slopes)),
      error_estimate_(error_estimate) {}

Vector ReferenceSolution::operator()(double t) const {
  if (t <= times_.front()) {
    return states_.front();
  }
  if (t >= times_.back()) {
    return states_.back();
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
  const double t0 = times_[k];
  const double h = times_[k + 1] - t0;
  const double s = (t - t0) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * states_[k] + h10 * h * slopes_[k] + h01 * states_[k + 1] + h11 * h * slopes_[k + 1];
}

ReferenceSolution reference_solve(const IVProblem& problem, double h_ref, double accept) {
  if (!(h_ref > 0.0) || h_ref > 1e-4 * problem.T * (1.0 + 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "reference step must satisfy h_ref <= 1e-4 T");
  }
  const long steps = std::max(1L, std::lround(problem.T / h_ref));
  std::vector<Vector> coarse = rk4_nodes(problem, steps);
  const std::vector<Vector> fine = rk4_nodes(problem, 2 * steps);

  double diff = 0.0;
  for (long n = 0; n <= steps; ++n) {
    const auto k = static_cast<std::size_t>(n);
    diff = std::max(diff, (coarse[k] - fine[2 * k]).cwiseAbs().maxCoeff());
  }
  // Fourth order: err(h) ~ 16/15 (y_h - y_{h/2}).
  const double estimate = diff * 16.0 / 15.0;
  if (!(estimate <= accept)) {
    throw Error(ErrorCode::OracleNotConverged,
                "RK4 Richardson estimate " + format_shortest(estimate) + " exceeds " +
                    format_shortest(accept));
  }
  std::vector<double> times(coarse.size());
  std::vector<Vector> slopes(coarse.size());
  const double h = problem.T / static_cast<double>(steps);
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    times[k] = static_cast<double>(k) * h;
    slopes[k] = problem.f(coarse[k]);
  }
  return ReferenceSolution(std::move(times), std::move(coarse), std::move(slopes), estimate);
}

}  // namespace odefilter

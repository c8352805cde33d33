#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "odefilter/linalg.hpp"

namespace odefilter {

using VectorField = std::function<Vector(const Vector&)>;
using ExactSolution = std::function<Vector(double)>;

/// Autonomous initial value problem x' = f(x), x(0) = x0 on [0, T].
///
/// `derivatives[i]` is the total derivative map g^(i) with g^(0) = identity,
/// g^(1) = f and g^(i) = (grad g^(i-1)) f, so that x^(i)(t) = g^(i)(x(t)).
struct IVProblem {
  std::string name;
  int d = 1;
  VectorField f;
  std::vector<VectorField> derivatives;
  Vector x0;
  double T = 1.0;
  ExactSolution exact;
  /// Human-readable parameter list, e.g. "lambda0=3;lambda1=1".
  std::string params;

  [[nodiscard]] int max_derivative() const { return static_cast<int>(derivatives.size()) - 1; }
  [[nodiscard]] bool has_exact() const { return static_cast<bool>(exact); }

  /// g^(i)(x); throws MissingDerivative when i exceeds max_derivative().
  [[nodiscard]] Vector derivative(int i, const Vector& x) const;
  /// x^(i)(t) from the closed-form solution; throws MissingExact without one.
  [[nodiscard]] Vector exact_derivative(int i, double t) const;
};

/// x' = lambda0 x (1 - x/lambda1); derivatives up to order 6.
[[nodiscard]] IVProblem logistic(double lambda0 = 3.0, double lambda1 = 1.0, double x0 = 0.1,
                                 double T = 1.5);

/// x' = [[0,-pi],[pi,0]] x, x0 = (0,1), T = 10.
[[nodiscard]] IVProblem linear_rotation();

/// x' = -x^3/2, x0 = 1, T = 1, exact (t+1)^{-1/2}.
[[nodiscard]] IVProblem riccati();

/// x' = c; every derivative beyond the first vanishes.
[[nodiscard]] IVProblem constant_field(const Vector& c, const Vector& x0, double T);

/// Registry lookup: logistic, linear, riccati, constant.
[[nodiscard]] IVProblem problem_by_name(std::string_view name);
[[nodiscard]] std::vector<std::string> problem_names();

/// Checks the problem invariants on `probes` points of [0, T]: the closed
/// form satisfies the ODE (finite differences, tolerance `tol`) and
/// g^(1) agrees with f. Returns the worst residual; throws InvalidArgument
/// when it exceeds tol.
double validate_problem(const IVProblem& problem, int probes = 100, double tol = 1e-8);

/// Dense fixed-step RK4 solution with cubic Hermite interpolation.
class ReferenceSolution {
 public:
  ReferenceSolution(std::vector<double> times, std::vector<Vector> states,
                    std::vector<Vector> slopes, double error_estimate);

  [[nodiscard]] Vector operator()(double t) const;
  [[nodiscard]] double error_estimate() const { return error_estimate_; }
  [[nodiscard]] const std::vector<double>& times() const { return times_; }
  [[nodiscard]] const std::vector<Vector>& states() const { return states_; }

 private:
  std::vector<double> times_;
  std::vector<Vector> states_;
  std::vector<Vector> slopes_;
  double error_estimate_;
};

/// Classical RK4 at step h_ref (rounded so T/h_ref is an integer). The
/// accuracy is self-estimated by Richardson comparison against h_ref/2;
/// throws OracleNotConverged when that estimate exceeds `accept`.
[[nodiscard]] ReferenceSolution reference_solve(const IVProblem& problem, double h_ref,
                                                double accept = 1e-8);

}  // namespace odefilter

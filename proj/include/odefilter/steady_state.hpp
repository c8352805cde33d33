#pragma once

#include <array>
#include <string>
#include <vector>

#include "odefilter/linalg.hpp"

namespace odefilter {

/// Limits of the q = 1 IBM covariance and gain recursion under constant R.
struct SteadyState {
  double h = 0.0;
  double sigma = 0.0;
  double R = 0.0;
  double P11_pred = 0.0;
  double P11 = 0.0;
  double P01_pred = 0.0;
  double P01 = 0.0;
  double beta0 = 0.0;
  double beta1 = 0.0;
};

/// Closed-form attractive fixed point of the q = 1 recursion.
[[nodiscard]] SteadyState closed_form(double h, double sigma, double R);

struct CovarianceStep {
  Matrix P_pred;
  Matrix P;
  Vector beta;
};

/// Data-free covariance recursion of the q = 1 IBM filter started at P0.
/// Uses the same predict/update code paths as the solver.
[[nodiscard]] std::vector<CovarianceStep> dare_orbit(double h, double sigma, double R,
                                                     const Matrix& P0, int n_steps);

/// The six steady-state quantities read off one orbit step.
[[nodiscard]] SteadyState read_steady_quantities(const CovarianceStep& step, double h,
                                                 double sigma, double R);

/// Largest absolute difference over the six quantities.
[[nodiscard]] double max_discrepancy(const SteadyState& a, const SteadyState& b);

struct OrbitLimit {
  SteadyState state;
  int iterations = 0;
  bool converged = false;
};

/// Iterates from P0 = 0 until successive changes fall below `threshold`.
[[nodiscard]] OrbitLimit orbit_limit(double h, double sigma, double R, double threshold = 1e-13,
                                     int max_iterations = 1000000);

/// Exponents bounding max_n P11^-, P11, |P01|, |beta0|, |1 - beta1| for R = K h^p.
[[nodiscard]] std::array<double, 5> predicted_exponents(double p);

inline constexpr std::array<const char*, 5> kOrderBoundQuantities = {
    "P11_pred", "P11", "abs_P01", "abs_beta0", "one_minus_beta1"};

struct OrderBoundQuantity {
  std::string name;
  double predicted = 0.0;
  double fitted = 0.0;
  /// The quantity vanished at every h (e.g. 1 - beta1 with R = 0).
  bool exact_zero = false;
  std::vector<double> max_values;  // one per h in the grid
};

struct OrderBoundReport {
  std::vector<double> h_grid;
  double sigma = 0.0;
  double p = 0.0;
  double K_R = 0.0;
  double T = 1.0;
  std::array<OrderBoundQuantity, 5> quantities;
};

/// For each h runs the orbit from P0 = 0 over T/h steps with R = K_R h^p,
/// records the maxima over n and fits log-log slopes with the largest h
/// excluded. Throws InsufficientGrid unless the grid has >= 4 decreasing
/// values spanning >= 2 decades.
[[nodiscard]] OrderBoundReport verify_order_bounds(const std::vector<double>& h_grid,
                                                   double sigma, double p, double K_R,
                                                   double T = 1.0);

}  // namespace odefilter

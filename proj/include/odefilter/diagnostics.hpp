#pragma once

#include <span>
#include <vector>

#include "odefilter/filter.hpp"
#include "odefilter/linalg.hpp"
#include "odefilter/problems.hpp"

namespace odefilter {

/// eps(nh) = m(nh) - x(nh) over the mesh, including n = 0.
struct ErrorSeries {
  std::vector<double> times;
  std::vector<Matrix> eps;           // (q+1) x d each
  std::vector<double> eps0_norm;     // ||eps^(0)(nh)||
  std::vector<double> h_norm_series; // |||eps(nh)|||_h
  double max_eps0 = 0.0;
};

/// Throws MissingExact when the problem has no closed-form solution.
[[nodiscard]] ErrorSeries global_error(const Trajectory& traj, const IVProblem& problem);

/// sum_i h^i ||row i of eps||
[[nodiscard]] double h_norm(const Matrix& eps, double h);

/// delta^(i)(nh) = ||m^(i)(nh) - g^(i)(m^(0)(nh))|| for n = 0..N.
[[nodiscard]] std::vector<double> misalignment(const Trajectory& traj, const IVProblem& problem,
                                               int i);

struct CredibleWidth {
  std::vector<double> times;
  std::vector<Vector> std_dev;  // sqrt(P00) per dimension
  std::vector<Vector> ratio;    // |eps^(0)_j| / sqrt(P00_j); 0/0 -> 1
  [[nodiscard]] double max_std() const;
};

/// Posterior standard deviations of x along the mesh.
[[nodiscard]] CredibleWidth credible_width(const Trajectory& traj);
/// Standard deviations plus calibration ratios; throws MissingExact.
[[nodiscard]] CredibleWidth credible_width(const Trajectory& traj, const IVProblem& problem);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope x + intercept. Needs >= 2 points.
[[nodiscard]] LineFit least_squares_line(std::span<const double> x, std::span<const double> y);

struct OrderFit {
  std::vector<double> h_values;
  std::vector<double> errors;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// Every error was exactly zero; slope carries no information.
  bool exact_zero = false;
};

/// Fits log(error) against log(h) after dropping the `drop_largest` largest
/// step sizes. Throws DegenerateFit with fewer than 3 remaining points, with
/// a mix of zero and positive errors, or when max/min of the errors is below
/// `min_span` (one decade by default; sweeps that expect flat curves pass 1).
[[nodiscard]] OrderFit fit_order(std::span<const double> h_values, std::span<const double> errors,
                                 int drop_largest = 1, double min_span = 10.0);

}  // namespace odefilter

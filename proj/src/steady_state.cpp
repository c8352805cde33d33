#include "odefilter/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "odefilter/diagnostics.hpp"
#include "odefilter/error.hpp"
#include "odefilter/filter.hpp"
#include "odefilter/prior.hpp"

namespace odefilter {

SteadyState closed_form(double h, double sigma, double R) {
  if (!(h > 0.0) || !(sigma > 0.0) || !(R >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "closed_form needs h, sigma > 0 and R >= 0");
  }
  const double s2h = sigma * sigma * h;
  const double root = std::sqrt(4.0 * sigma * sigma * R * h + s2h * s2h);
  const double a = s2h + root;
  SteadyState ss;
  ss.h = h;
  ss.sigma = sigma;
  ss.R = R;
  ss.P11_pred = 0.5 * a;
  ss.P11 = a * R / (a + 2.0 * R);
  ss.P01_pred = (s2h * s2h + (2.0 * R + s2h) * root + 4.0 * R * s2h) / (2.0 * a) * h;
  ss.P01 = R * root / a * h;
  ss.beta0 = root / a * h;
  ss.beta1 = a / (a + 2.0 * R);
  return ss;
}

std::vector<CovarianceStep> dare_orbit(double h, double sigma, double R, const Matrix& P0,
                                       int n_steps) {
  if (P0.rows() != 2 || P0.cols() != 2) {
    throw Error(ErrorCode::DimensionMismatch, "dare_orbit works on 2x2 covariances (q = 1)");
  }
  if (n_steps < 1) {
    throw Error(ErrorCode::InvalidArgument, "n_steps must be positive");
  }
  const TransitionModel tm = ibm_transition(1, sigma, h);
  std::vector<CovarianceStep> orbit;
  orbit.reserve(static_cast<std::size_t>(n_steps));
  Matrix P = P0;
  for (int n = 0; n < n_steps; ++n) {
    CovarianceStep step;
    step.P_pred = predict_covariance(P, tm);
    step.beta = gain(step.P_pred, R);
    step.P = update_covariance(step.P_pred, R);
    P = step.P;
    orbit.push_back(std::move(step));
  }
  return orbit;
}

SteadyState read_steady_quantities(const CovarianceStep& step, double h, double sigma, double R) {
  SteadyState ss;
  ss.h = h;
  ss.sigma = sigma;
  ss.R = R;
  ss.P11_pred = step.P_pred(1, 1);
  ss.P11 = step.P(1, 1);
  ss.P01_pred = step.P_pred(0, 1);
  ss.P01 = step.P(0, 1);
  ss.beta0 = step.beta(0);
  ss.beta1 = step.beta(1);
  return ss;
}

double max_discrepancy(const SteadyState& a, const SteadyState& b) {
  return std::max({std::abs(a.P11_pred - b.P11_pred), std::abs(a.P11 - b.P11),
                   std::abs(a.P01_pred - b.P01_pred), std::abs(a.P01 - b.P01),
                   std::abs(a.beta0 - b.beta0), std::abs(a.beta1 - b.beta1)});
}

OrbitLimit orbit_limit(double h, double sigma, double R, double threshold, int max_iterations) {
  const TransitionModel tm = ibm_transition(1, sigma, h);
  Matrix P = Matrix::Zero(2, 2);
  OrbitLimit out;
  SteadyState previous{};
  for (int n = 1; n <= max_iterations; ++n) {
    CovarianceStep step;
    step.P_pred = predict_covariance(P, tm);
    step.beta = gain(step.P_pred, R);
    step.P = update_covariance(step.P_pred, R);
    P = step.P;
    const SteadyState current = read_steady_quantities(step, h, sigma, R);
    out.state = current;
    out.iterations = n;
    if (n > 1 && max_discrepancy(current, previous) < threshold) {
      out.converged = true;
      break;
    }
    previous = current;
  }
  return out;
}

std::array<double, 5> predicted_exponents(double p) {
  const double half = (p + 1.0) / 2.0;
  return {std::min(1.0, half), std::max(p, half), p + 1.0, 1.0, std::max(p - 1.0, 0.0)};
}

OrderBoundReport verify_order_bounds(const std::vector<double>& h_grid, double sigma, double p,
                                     double K_R, double T) {
  if (h_grid.size() < 4) {
    throw Error(ErrorCode::InsufficientGrid, "order-bound sweep needs at least 4 step sizes");
  }
  for (std::size_t k = 1; k < h_grid.size(); ++k) {
    if (!(h_grid[k] < h_grid[k - 1]) || !(h_grid[k] > 0.0)) {
      throw Error(ErrorCode::InsufficientGrid, "step sizes must be positive and decreasing");
    }
  }
  if (h_grid.front() / h_grid.back() < 100.0 * (1.0 - 1e-12)) {
    throw Error(ErrorCode::InsufficientGrid, "step sizes must span at least two decades");
  }

  OrderBoundReport report;
  report.h_grid = h_grid;
  report.sigma = sigma;
  report.p = p;
  report.K_R = K_R;
  report.T = T;
  const auto predicted = predicted_exponents(p);
  for (std::size_t k = 0; k < 5; ++k) {
    report.quantities[k].name = kOrderBoundQuantities[k];
    report.quantities[k].predicted = predicted[k];
  }

  std::array<bool, 5> all_small{true, true, true, true, true};
  for (double h : h_grid) {
    const double R = std::isinf(p) ? 0.0 : K_R * std::pow(h, p);
    const int steps = std::max(1, static_cast<int>(std::lround(T / h)));
    const auto orbit = dare_orbit(h, sigma, R, Matrix::Zero(2, 2), steps);
    std::array<double, 5> maxima{};
    for (const CovarianceStep& s : orbit) {
      maxima[0] = std::max(maxima[0], s.P_pred(1, 1));
      maxima[1] = std::max(maxima[1], s.P(1, 1));
      maxima[2] = std::max(maxima[2], std::abs(s.P(0, 1)));
      maxima[3] = std::max(maxima[3], std::abs(s.beta(0)));
      maxima[4] = std::max(maxima[4], std::abs(1.0 - s.beta(1)));
    }
    // Magnitudes below which a quantity is roundoff around an exact zero.
    const double s2h = sigma * sigma * h;
    const std::array<double, 5> scale{s2h, s2h, s2h * h, h, 1.0};
    for (std::size_t k = 0; k < 5; ++k) {
      report.quantities[k].max_values.push_back(maxima[k]);
      all_small[k] = all_small[k] && maxima[k] <= 1e-12 * scale[k];
    }
  }

  std::vector<double> log_h;
  for (std::size_t k = 1; k < h_grid.size(); ++k) {
    log_h.push_back(std::log(h_grid[k]));
  }
  for (std::size_t k = 0; k < 5; ++k) {
    OrderBoundQuantity& quantity = report.quantities[k];
    if (all_small[k]) {
      quantity.exact_zero = true;
      quantity.fitted = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    std::vector<double> log_v;
    for (std::size_t n = 1; n < quantity.max_values.size(); ++n) {
      log_v.push_back(std::log(std::max(quantity.max_values[n], std::numeric_limits<double>::min())));
    }
    quantity.fitted = least_squares_line(log_h, log_v).slope;
  }
  return report;
}

}  // namespace odefilter

#include "odefilter/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "odefilter/error.hpp"

namespace odefilter {

double h_norm(const Matrix& eps, double h) {
  if (!(h > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "h-norm needs h > 0");
  }
  double total = 0.0;
  double weight = 1.0;
  for (Eigen::Index i = 0; i < eps.rows(); ++i) {
    total += weight * eps.row(i).norm();
    weight *= h;
  }
  return total;
}

ErrorSeries global_error(const Trajectory& traj, const IVProblem& problem) {
  if (!problem.has_exact()) {
    throw Error(ErrorCode::MissingExact, "problem '" + problem.name + "' has no exact solution");
  }
  const double h = traj.config.h;
  ErrorSeries out;
  for (std::size_t n = 0; n <= traj.steps(); ++n) {
    const Belief b = traj.belief(n);
    Matrix truth(b.m.rows(), b.m.cols());
    const Vector x = problem.exact(b.t);
    for (int i = 0; i <= b.q(); ++i) {
      truth.row(i) = problem.derivative(i, x).transpose();
    }
    Matrix eps = b.m - truth;
    const double e0 = eps.row(0).norm();
    out.times.push_back(b.t);
    out.eps0_norm.push_back(e0);
    out.h_norm_series.push_back(h_norm(eps, h));
    out.max_eps0 = std::max(out.max_eps0, e0);
    out.eps.push_back(std::move(eps));
  }
  return out;
}

std::vector<double> misalignment(const Trajectory& traj, const IVProblem& problem, int i) {
  if (i < 0 || i > problem.max_derivative()) {
    throw Error(ErrorCode::MissingDerivative,
                "problem '" + problem.name + "' has no derivative of order " + std::to_string(i));
  }
  std::vector<double> out;
  out.reserve(traj.steps() + 1);
  for (std::size_t n = 0; n <= traj.steps(); ++n) {
    const Belief b = traj.belief(n);
    if (i > b.q()) {
      throw Error(ErrorCode::InvalidArgument, "misalignment order exceeds q");
    }
    if (i == 0) {
      out.push_back(0.0);
      continue;
    }
    const Vector x0 = b.m.row(0).transpose();
    out.push_back((b.m.row(i).transpose() - problem.derivative(i, x0)).norm());
  }
  return out;
}

double CredibleWidth::max_std() const {
  double best = 0.0;
  for (const Vector& s : std_dev) {
    best = std::max(best, s.maxCoeff());
  }
  return best;
}

CredibleWidth credible_width(const Trajectory& traj) {
  CredibleWidth out;
  for (std::size_t n = 0; n <= traj.steps(); ++n) {
    const Belief b = traj.belief(n);
    Vector s(b.d());
    for (int j = 0; j < b.d(); ++j) {
      s(j) = std::sqrt(std::max(b.P[static_cast<std::size_t>(j)](0, 0), 0.0));
    }
    out.times.push_back(b.t);
    out.std_dev.push_back(std::move(s));
  }
  return out;
}

CredibleWidth credible_width(const Trajectory& traj, const IVProblem& problem) {
  CredibleWidth out = credible_width(traj);
  const ErrorSeries err = global_error(traj, problem);
  for (std::size_t n = 0; n < out.std_dev.size(); ++n) {
    const Vector& s = out.std_dev[n];
    Vector ratio(s.size());
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      const double e = std::abs(err.eps[n](0, j));
      ratio(j) = (e == 0.0 && s(j) == 0.0) ? 1.0 : e / s(j);
    }
    out.ratio.push_back(std::move(ratio));
  }
  return out;
}

LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::DegenerateFit, "line fit needs at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (!(sxx > 0.0)) {
    throw Error(ErrorCode::DegenerateFit, "abscissae are all equal");
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

OrderFit fit_order(std::span<const double> h_values, std::span<const double> errors,
                   int drop_largest, double min_span) {
  if (h_values.size() != errors.size()) {
    throw Error(ErrorCode::DimensionMismatch, "step sizes and errors differ in length");
  }
  std::vector<std::size_t> order(h_values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return h_values[a] > h_values[b]; });
  const std::size_t skip = static_cast<std::size_t>(std::max(drop_largest, 0));
  if (order.size() < skip + 3) {
    throw Error(ErrorCode::DegenerateFit, "need at least 3 points after dropping the largest h");
  }

  OrderFit fit;
  for (std::size_t k = skip; k < order.size(); ++k) {
    fit.h_values.push_back(h_values[order[k]]);
    fit.errors.push_back(errors[order[k]]);
  }
  const bool any_zero = std::any_of(fit.errors.begin(), fit.errors.end(), [](double e) { return e == 0.0; });
  const bool all_zero = std::all_of(fit.errors.begin(), fit.errors.end(), [](double e) { return e == 0.0; });
  if (all_zero) {
    fit.exact_zero = true;
    fit.r_squared = 1.0;
    return fit;
  }
  if (any_zero || std::any_of(fit.errors.begin(), fit.errors.end(),
                              [](double e) { return !(e > 0.0) || !std::isfinite(e); })) {
    throw Error(ErrorCode::DegenerateFit, "errors must be finite and positive (or all zero)");
  }
  const auto [lo, hi] = std::minmax_element(fit.errors.begin(), fit.errors.end());
  if (*hi / *lo < min_span) {
    throw Error(ErrorCode::DegenerateFit, "errors span less than the required range");
  }
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t k = 0; k < fit.h_values.size(); ++k) {
    lx.push_back(std::log(fit.h_values[k]));
    ly.push_back(std::log(fit.errors[k]));
  }
  const LineFit line = least_squares_line(lx, ly);
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.r_squared = line.r_squared;
  return fit;
}

}  // namespace odefilter

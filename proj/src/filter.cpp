#include "odefilter/filter.hpp"

#include <cmath>
#include <random>

#include "odefilter/error.hpp"
#include "odefilter/format.hpp"

namespace odefilter {
namespace {

void check_shapes(const Belief& b) {
  if (b.P.size() != static_cast<std::size_t>(b.d())) {
    throw Error(ErrorCode::DimensionMismatch, "belief needs one covariance per dimension");
  }
}

bool all_equal(const std::vector<Matrix>& ps) {
  for (std::size_t j = 1; j < ps.size(); ++j) {
    if (ps[j] != ps.front()) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::string to_string(const InitMode& mode) {
  if (const auto* p = std::get_if<PerturbedInit>(&mode)) {
    return "perturbed:" + format_shortest(p->K0);
  }
  return "exact";
}

InitMode parse_init_mode(const std::string& text, std::uint64_t seed) {
  if (text == "exact") {
    return ExactInit{};
  }
  if (text.starts_with("perturbed:")) {
    const std::string value = text.substr(10);
    try {
      std::size_t used = 0;
      const double k0 = std::stod(value, &used);
      if (used == value.size() && k0 >= 0.0) {
        return PerturbedInit{k0, seed};
      }
    } catch (const std::exception&) {
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown init mode '" + text + "'");
}

Belief Trajectory::belief(std::size_t n) const {
  if (n == 0) {
    return initial;
  }
  return records.at(n - 1).posterior();
}

Belief initialize(const IVProblem& problem, const PriorSpec& prior, double h,
                  const InitMode& mode) {
  const int q = prior.q;
  if (q > problem.max_derivative()) {
    throw Error(ErrorCode::MissingDerivative, "problem '" + problem.name +
                                                  "' supplies derivatives up to order " +
                                                  std::to_string(problem.max_derivative()) +
                                                  ", prior needs " + std::to_string(q));
  }
  Belief b;
  b.t = 0.0;
  b.m = Matrix::Zero(q + 1, problem.d);
  for (int i = 0; i <= q; ++i) {
    b.m.row(i) = problem.derivative(i, problem.x0).transpose();
  }
  Matrix p0 = Matrix::Zero(q + 1, q + 1);
  if (const auto* pert = std::get_if<PerturbedInit>(&mode); pert != nullptr && pert->K0 > 0.0) {
    std::mt19937_64 rng(pert->seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i <= q; ++i) {
      const double bound = pert->K0 * std::pow(h, q + 1 - i);
      for (int j = 0; j < problem.d; ++j) {
        b.m(i, j) += bound * unit(rng);
      }
    }
    for (int k = 0; k <= q; ++k) {
      for (int l = 0; l <= q; ++l) {
        p0(k, l) = pert->K0 * std::pow(h, 2 * q + 1 - k - l);
      }
    }
    linalg::condition_covariance(p0);
  }
  b.P.assign(static_cast<std::size_t>(problem.d), p0);
  return b;
}

Matrix predict_covariance(const Matrix& P, const TransitionModel& tm) {
  return linalg::symmetrized(tm.A * P * tm.A.transpose() + tm.Q);
}

Belief predict(const Belief& b, const TransitionModel& tm) {
  check_shapes(b);
  Belief out;
  out.t = b.t + tm.h;
  out.m = tm.A * b.m;
  out.P.reserve(b.P.size());
  for (const Matrix& P : b.P) {
    out.P.push_back(predict_covariance(P, tm));
  }
  return out;
}

Belief predict(const Belief& b, const std::vector<TransitionModel>& per_dim) {
  check_shapes(b);
  if (per_dim.size() != b.P.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one transition per dimension required");
  }
  Belief out;
  out.t = b.t + per_dim.front().h;
  out.m = Matrix(b.m.rows(), b.m.cols());
  out.P.reserve(b.P.size());
  for (std::size_t j = 0; j < b.P.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    out.m.col(col) = per_dim[j].A * b.m.col(col);
    out.P.push_back(predict_covariance(b.P[j], per_dim[j]));
  }
  return out;
}

Vector evaluate_data(const VectorField& f, const Matrix& m_pred) {
  const Vector x = m_pred.row(0).transpose();
  if (!x.allFinite()) {
    throw Error(ErrorCode::DivergedEvaluation, "predicted state is not finite");
  }
  Vector y = f(x);
  if (!y.allFinite()) {
    throw Error(ErrorCode::DivergedEvaluation, "vector field returned a non-finite value");
  }
  return y;
}

Vector gain(const Matrix& P_pred, double R) {
  if (P_pred.rows() < 2) {
    throw Error(ErrorCode::InvalidArgument, "gain needs q >= 1");
  }
  const double innovation = P_pred(1, 1) + R;
  if (!(innovation > 0.0)) {
    throw Error(ErrorCode::SingularInnovation, "P^-_11 + R must be positive");
  }
  return P_pred.col(1) / innovation;
}

Matrix update_covariance(const Matrix& P_pred, double R) {
  const double innovation = P_pred(1, 1) + R;
  if (!(innovation > 0.0)) {
    throw Error(ErrorCode::SingularInnovation, "P^-_11 + R must be positive");
  }
  Matrix P = P_pred - (P_pred.col(1) * P_pred.col(1).transpose()) / innovation;
  linalg::condition_covariance(P);
  return P;
}

UpdateResult update(const Belief& pred, const Vector& y, double R, CovarianceMode mode) {
  check_shapes(pred);
  if (y.size() != pred.d()) {
    throw Error(ErrorCode::DimensionMismatch, "data dimension differs from belief");
  }
  if (!(R >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "measurement variance must be non-negative");
  }
  const auto d = static_cast<std::size_t>(pred.d());
  StepRecord rec;
  rec.t = pred.t;
  rec.m_pred = pred.m;
  rec.P_pred = pred.P;
  rec.y = y;
  rec.r = y - pred.m.row(1).transpose();
  rec.beta = Matrix(pred.m.rows(), pred.m.cols());
  rec.m = pred.m;
  rec.P.reserve(d);

  const bool shared = mode == CovarianceMode::SharedWhenUniform && all_equal(pred.P);
  for (std::size_t j = 0; j < d; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    if (shared && j > 0) {
      rec.beta.col(col) = rec.beta.col(0);
      rec.P.push_back(rec.P.front());
    } else {
      rec.beta.col(col) = gain(pred.P[j], R);
      rec.P.push_back(update_covariance(pred.P[j], R));
    }
    rec.m.col(col) += rec.beta.col(col) * rec.r(col);
  }
  Belief post{rec.t, rec.m, rec.P};
  return UpdateResult{std::move(post), std::move(rec)};
}

Trajectory solve(const IVProblem& problem, const PriorSpec& prior, double h,
                 const NoiseModel& noise, const InitMode& mode, const SolveOptions& options) {
  prior.validate();
  if (prior.q < 1) {
    throw Error(ErrorCode::InvalidArgument, "the filter needs q >= 1");
  }
  if (!(h > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "step size must be positive");
  }
  const double ratio = problem.T / h;
  const double steps_real = std::round(ratio);
  if (std::abs(ratio - steps_real) > 1e-9 * std::max(1.0, ratio) || steps_real < 1.0) {
    throw Error(ErrorCode::NonIntegerMesh, "T/h = " + format_shortest(ratio) +
                                               " is not a positive integer");
  }
  const auto steps = static_cast<std::size_t>(steps_real);
  if (!prior.sigma_per_dim.empty() &&
      prior.sigma_per_dim.size() != static_cast<std::size_t>(problem.d)) {
    throw Error(ErrorCode::DimensionMismatch, "per-dimension sigma count differs from d");
  }

  Trajectory traj;
  traj.problem = problem.name;
  traj.config = SolveConfig{prior, h, noise, mode, noise.evaluate(h)};
  traj.initial = initialize(problem, prior, h, mode);
  if (options.keep_history) {
    traj.records.reserve(steps);
  }

  // A does not depend on sigma and Q scales with sigma^2.
  PriorSpec unit = prior;
  unit.sigma = 1.0;
  unit.sigma_per_dim.clear();
  const TransitionModel base = transition(unit, h);
  std::vector<TransitionModel> per_dim;
  for (int j = 0; j < problem.d; ++j) {
    const double s = prior.sigma_for(static_cast<std::size_t>(j));
    per_dim.push_back(TransitionModel{h, base.A, s * s * base.Q});
  }
  const bool uniform = prior.uniform_sigma();
  const CovarianceMode cov_mode = (options.covariance == CovarianceMode::SharedWhenUniform && uniform)
                                      ? CovarianceMode::SharedWhenUniform
                                      : CovarianceMode::PerDimension;
  const double R = traj.config.R;

  Belief current = traj.initial;
  for (std::size_t n = 1; n <= steps; ++n) {
    Belief pred = uniform ? predict(current, per_dim.front()) : predict(current, per_dim);
    pred.t = static_cast<double>(n) * h;
    Vector y;
    try {
      y = evaluate_data(problem.f, pred.m);
    } catch (const Error& e) {
      traj.diverged = true;
      traj.diverged_reason = e.what();
      break;
    }
    UpdateResult up = update(pred, y, R, cov_mode);
    current = std::move(up.posterior);
    ++traj.steps_taken;
    if (options.on_step) {
      options.on_step(up.record);
    }
    if (!options.keep_history) {
      traj.records.clear();
    }
    traj.records.push_back(std::move(up.record));
  }
  return traj;
}

}  // namespace odefilter

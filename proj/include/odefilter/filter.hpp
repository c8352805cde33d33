#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "odefilter/linalg.hpp"
#include "odefilter/noise.hpp"
#include "odefilter/prior.hpp"
#include "odefilter/problems.hpp"

namespace odefilter {

/// Gaussian belief over the derivative stack at time t.
///
/// Row i of `m` estimates x^(i)(t) (one column per dimension); `P[j]` is the
/// (q+1)x(q+1) covariance of dimension j.
struct Belief {
  double t = 0.0;
  Matrix m;
  std::vector<Matrix> P;

  [[nodiscard]] int q() const { return static_cast<int>(m.rows()) - 1; }
  [[nodiscard]] int d() const { return static_cast<int>(m.cols()); }
};

/// Everything computed during one step t -> t + h.
struct StepRecord {
  double t = 0.0;
  Matrix m_pred;
  std::vector<Matrix> P_pred;
  Vector y;
  Vector r;
  Matrix beta;
  Matrix m;
  std::vector<Matrix> P;

  [[nodiscard]] Belief posterior() const { return Belief{t, m, P}; }
};

struct ExactInit {};

/// Initial means offset uniformly within |eps^(i)(0)| <= K0 h^(q+1-i) and
/// P(0)_kl = K0 h^(2q+1-k-l).
struct PerturbedInit {
  double K0 = 0.0;
  std::uint64_t seed = 0;
};

using InitMode = std::variant<ExactInit, PerturbedInit>;

[[nodiscard]] std::string to_string(const InitMode& mode);
/// `exact` or `perturbed:<K0>`; the seed is supplied separately.
[[nodiscard]] InitMode parse_init_mode(const std::string& text, std::uint64_t seed);

enum class CovarianceMode {
  /// One covariance recursion for all dimensions when sigma is uniform.
  SharedWhenUniform,
  PerDimension,
};

struct SolveOptions {
  CovarianceMode covariance = CovarianceMode::SharedWhenUniform;
  /// When false only the last step is retained in Trajectory::records.
  bool keep_history = true;
  /// Called after every update, in step order.
  std::function<void(const StepRecord&)> on_step;
};

struct SolveConfig {
  PriorSpec prior;
  double h = 0.0;
  NoiseModel noise;
  InitMode init;
  double R = 0.0;
};

/// Output of a full solve on the uniform mesh {n h}.
struct Trajectory {
  std::string problem;
  SolveConfig config;
  Belief initial;
  std::vector<StepRecord> records;
  bool diverged = false;
  std::string diverged_reason;
  /// Steps actually taken (equals records.size() when history is kept).
  std::size_t steps_taken = 0;

  [[nodiscard]] std::size_t steps() const { return records.size(); }
  /// Belief at mesh index n (0 is the initial belief).
  [[nodiscard]] Belief belief(std::size_t n) const;
  [[nodiscard]] Belief final_belief() const { return belief(records.size()); }
};

/// Throws MissingDerivative if the problem lacks g^(i) for some i <= q.
[[nodiscard]] Belief initialize(const IVProblem& problem, const PriorSpec& prior, double h,
                                const InitMode& mode);

/// m^-_j = A m_j and P^-_j = A P_j A^T + Q for every dimension.
[[nodiscard]] Belief predict(const Belief& b, const TransitionModel& tm);
/// Per-dimension transitions (differing only through sigma_j).
[[nodiscard]] Belief predict(const Belief& b, const std::vector<TransitionModel>& per_dim);

/// y = f(row 0 of m_pred). Throws DivergedEvaluation on non-finite data.
[[nodiscard]] Vector evaluate_data(const VectorField& f, const Matrix& m_pred);

/// beta^(i) = P^-_{i1} / (P^-_{11} + R). Throws SingularInnovation when the
/// denominator vanishes.
[[nodiscard]] Vector gain(const Matrix& P_pred, double R);

/// Conditions one covariance on derivative data with variance R.
[[nodiscard]] Matrix update_covariance(const Matrix& P_pred, double R);
/// A P A^T + Q, symmetrized.
[[nodiscard]] Matrix predict_covariance(const Matrix& P, const TransitionModel& tm);

struct UpdateResult {
  Belief posterior;
  StepRecord record;
};

/// Kalman update of the predictive belief on data y.
[[nodiscard]] UpdateResult update(const Belief& pred, const Vector& y, double R,
                                  CovarianceMode mode = CovarianceMode::PerDimension);

/// Runs N = T/h steps of predict, evaluate, update. Throws NonIntegerMesh when
/// T/h is not an integer (to 1e-9) and InvalidArgument for q < 1. A
/// non-finite vector-field value stops the run and flags the trajectory as
/// diverged.
[[nodiscard]] Trajectory solve(const IVProblem& problem, const PriorSpec& prior, double h,
                               const NoiseModel& noise, const InitMode& mode = ExactInit{},
                               const SolveOptions& options = {});

}  // namespace odefilter

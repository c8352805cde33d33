#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "odefilter/linalg.hpp"

namespace odefilter {

enum class PriorKind { IBM, IOUP };

[[nodiscard]] std::string to_string(PriorKind kind);
[[nodiscard]] PriorKind parse_prior_kind(const std::string& text);

/// Gauss-Markov prior over (x, x', ..., x^(q)) per dimension.
///
/// The top derivative follows dX^(q) = -theta X^(q) dt + sigma dB; theta = 0
/// gives the q-times integrated Brownian motion, theta > 0 the integrated
/// Ornstein-Uhlenbeck process.
struct PriorSpec {
  int q = 1;
  PriorKind kind = PriorKind::IBM;
  double theta = 0.0;
  double sigma = 1.0;
  /// Optional per-dimension diffusion scales. Empty means `sigma` everywhere.
  std::vector<double> sigma_per_dim;

  [[nodiscard]] static PriorSpec ibm(int q, double sigma);
  [[nodiscard]] static PriorSpec ioup(int q, double theta, double sigma);

  /// Throws InvalidArgument unless the kind/theta/sigma invariants hold.
  void validate() const;

  [[nodiscard]] double sigma_for(std::size_t dim) const;
  /// True when every dimension shares one diffusion scale.
  [[nodiscard]] bool uniform_sigma() const;
};

/// Exact discrete-time transition over a step h: mean map A and process noise Q.
struct TransitionModel {
  double h = 0.0;
  Matrix A;
  Matrix Q;
};

/// (q+1)x(q+1) companion matrix: ones on the superdiagonal, `a` as last row.
[[nodiscard]] Matrix companion_matrix(int q, const Vector& a);

/// Closed-form IBM transition. Q is exact (no truncated remainder).
[[nodiscard]] TransitionModel ibm_transition(int q, double sigma, double h);

/// IOUP transition. The last column of A uses the incomplete-exponential
/// closed form; Q sums the double series entry by entry until the remaining
/// tail is bounded by tol times the partial sum. Throws NonConvergence past
/// 1000 terms.
[[nodiscard]] TransitionModel ioup_transition(int q, double theta, double sigma, double h,
                                              double tol = 1e-15);

/// Reference discretization of dX = F X dt + sigma L dB through matrix
/// exponentials (Van Loan block method). Meant for cross-checking the closed
/// forms, not for production stepping.
[[nodiscard]] TransitionModel transition_oracle(const Matrix& F, const Vector& L, double sigma,
                                                double h);

/// Dispatches on the prior kind. Uses prior.sigma.
[[nodiscard]] TransitionModel transition(const PriorSpec& prior, double h);

/// Continuous-time drift F and diffusion direction L (unit scale) for a prior.
[[nodiscard]] Matrix drift_matrix(const PriorSpec& prior);
[[nodiscard]] Vector diffusion_vector(int q);

/// Kronecker-coupled multi-dimensional drift. L_big uses the unit diffusion
/// direction; sigma enters when discretizing.
struct MultiDimDrift {
  Matrix Kx;
  Matrix Keps;
  Matrix F_big;
  Matrix L_big;
};

[[nodiscard]] MultiDimDrift kron_extend(const Matrix& Kx, const Matrix& Keps,
                                        const PriorSpec& prior);

/// Van Loan discretization for a matrix-valued diffusion (used with kron_extend).
[[nodiscard]] TransitionModel transition_oracle(const Matrix& F, const Matrix& L, double sigma,
                                                double h);

}  // namespace odefilter

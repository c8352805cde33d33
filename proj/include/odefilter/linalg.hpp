#pragma once

#include <Eigen/Dense>

namespace odefilter {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// exp(X) by scaling-and-squaring with a degree-12 Taylor polynomial.
[[nodiscard]] Matrix expm(const Matrix& x);

/// (P + P^T) / 2
[[nodiscard]] Matrix symmetrized(const Matrix& p);

/// Symmetrizes in place and floors eigenvalues at zero when the most negative
/// eigenvalue falls below -tol * trace. Returns true if a projection happened.
bool condition_covariance(Matrix& p, double tol = 1e-14);

/// Smallest eigenvalue of the symmetric part of p.
[[nodiscard]] double min_eigenvalue(const Matrix& p);

[[nodiscard]] Matrix kron(const Matrix& a, const Matrix& b);

/// ||a - b||_F / max(||b||_F, tiny)
[[nodiscard]] double relative_frobenius(const Matrix& a, const Matrix& b);

}  // namespace linalg
}  // namespace odefilter

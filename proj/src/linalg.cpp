#include "odefilter/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "odefilter/error.hpp"

namespace odefilter {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MissingDerivative: return "MissingDerivative";
    case ErrorCode::MissingExact: return "MissingExact";
    case ErrorCode::DivergedEvaluation: return "DivergedEvaluation";
    case ErrorCode::SingularInnovation: return "SingularInnovation";
    case ErrorCode::NonIntegerMesh: return "NonIntegerMesh";
    case ErrorCode::InsufficientGrid: return "InsufficientGrid";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::OracleNotConverged: return "OracleNotConverged";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace linalg {

Matrix expm(const Matrix& x) {
  if (x.rows() != x.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "expm requires a square matrix");
  }
  const Eigen::Index n = x.rows();
  const double norm1 = x.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  }
  const Matrix scaled = x / std::ldexp(1.0, squarings);

  // Horner evaluation of sum_{k=0}^{12} X^k / k!.
  constexpr int kDegree = 12;
  const Matrix identity = Matrix::Identity(n, n);
  Matrix result = identity;
  for (int k = kDegree; k >= 1; --k) {
    result = identity + (scaled * result) / static_cast<double>(k);
  }
  for (int s = 0; s < squarings; ++s) {
    result = result * result;
  }
  return result;
}

Matrix symmetrized(const Matrix& p) { return 0.5 * (p + p.transpose()); }

double min_eigenvalue(const Matrix& p) {
  if (p.size() == 0) {
    return 0.0;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(p), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool condition_covariance(Matrix& p, double tol) {
  p = symmetrized(p);
  const double trace = std::max(p.trace(), 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(p);
  const Vector& eig = solver.eigenvalues();
  if (eig.minCoeff() >= -tol * trace) {
    return false;
  }
  const Vector floored = eig.cwiseMax(0.0);
  p = solver.eigenvectors() * floored.asDiagonal() * solver.eigenvectors().transpose();
  p = symmetrized(p);
  return true;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double relative_frobenius(const Matrix& a, const Matrix& b) {
  const double denom = std::max(b.norm(), std::numeric_limits<double>::min());
  return (a - b).norm() / denom;
}

}  // namespace linalg
}  // namespace odefilter

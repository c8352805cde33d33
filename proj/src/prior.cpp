#include "odefilter/prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "odefilter/error.hpp"

namespace odefilter {
namespace {

constexpr int kMaxSeriesTerms = 1000;

double factorial(int n) {
  double out = 1.0;
  for (int k = 2; k <= n; ++k) {
    out *= k;
  }
  return out;
}

// 1/k! for k = 0..n; underflows to zero for large k.
std::vector<double> inverse_factorials(int n) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  out[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    out[static_cast<std::size_t>(k)] = out[static_cast<std::size_t>(k) - 1] / k;
  }
  return out;
}

// sum_{m>=0} (-x)^m / (m+n)!, i.e. (-x)^{-n} (e^{-x} - sum_{k<n} (-x)^k/k!).
// The power series is used for x <= 1 where the closed form cancels badly.
double exp_remainder(int n, double x) {
  if (x <= 1.0) {
    double term = 1.0 / factorial(n);
    double sum = term;
    for (int m = 1; m < 200; ++m) {
      term *= -x / static_cast<double>(m + n);
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) {
        break;
      }
    }
    return sum;
  }
  double partial = 0.0;
  double power = 1.0;
  for (int k = 0; k < n; ++k) {
    partial += power / factorial(k);
    power *= -x;
  }
  return (std::exp(-x) - partial) / std::pow(-x, n);
}

void check_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::InvalidArgument, "step size must be positive and finite");
  }
}

void check_order(int q) {
  if (q < 0) {
    throw Error(ErrorCode::InvalidArgument, "q must be non-negative");
  }
}

}  // namespace

std::string to_string(PriorKind kind) { return kind == PriorKind::IBM ? "ibm" : "ioup"; }

PriorKind parse_prior_kind(const std::string& text) {
  if (text == "ibm") {
    return PriorKind::IBM;
  }
  if (text == "ioup") {
    return PriorKind::IOUP;
  }
  throw Error(ErrorCode::ConfigError, "unknown prior '" + text + "' (expected ibm or ioup)");
}

PriorSpec PriorSpec::ibm(int q, double sigma) {
  PriorSpec p;
  p.q = q;
  p.kind = PriorKind::IBM;
  p.theta = 0.0;
  p.sigma = sigma;
  return p;
}

PriorSpec PriorSpec::ioup(int q, double theta, double sigma) {
  PriorSpec p;
  p.q = q;
  p.kind = PriorKind::IOUP;
  p.theta = theta;
  p.sigma = sigma;
  return p;
}

void PriorSpec::validate() const {
  check_order(q);
  if (kind == PriorKind::IBM && theta != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "IBM prior requires theta = 0");
  }
  if (kind == PriorKind::IOUP && !(theta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "IOUP prior requires theta > 0");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  }
  for (double s : sigma_per_dim) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::InvalidArgument, "per-dimension sigma must be positive");
    }
  }
}

double PriorSpec::sigma_for(std::size_t dim) const {
  if (sigma_per_dim.empty()) {
    return sigma;
  }
  if (dim >= sigma_per_dim.size()) {
    throw Error(ErrorCode::DimensionMismatch, "no sigma given for dimension " + std::to_string(dim));
  }
  return sigma_per_dim[dim];
}

bool PriorSpec::uniform_sigma() const {
  return std::all_of(sigma_per_dim.begin(), sigma_per_dim.end(),
                     [&](double s) { return s == sigma_per_dim.front(); });
}

Matrix companion_matrix(int q, const Vector& a) {
  check_order(q);
  if (a.size() != q + 1) {
    throw Error(ErrorCode::DimensionMismatch, "companion coefficients must have length q+1");
  }
  Matrix F = Matrix::Zero(q + 1, q + 1);
  for (int i = 0; i < q; ++i) {
    F(i, i + 1) = 1.0;
  }
  F.row(q) = a.transpose();
  return F;
}

TransitionModel ibm_transition(int q, double sigma, double h) {
  check_order(q);
  check_step(h);
  const int n = q + 1;
  TransitionModel tm{h, Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      tm.A(i, j) = std::pow(h, j - i) / factorial(j - i);
    }
  }
  const double s2 = sigma * sigma;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int e = 2 * q + 1 - i - j;
      tm.Q(i, j) = s2 * std::pow(h, e) / (e * factorial(q - i) * factorial(q - j));
    }
  }
  return tm;
}

TransitionModel ioup_transition(int q, double theta, double sigma, double h, double tol) {
  check_order(q);
  check_step(h);
  if (!(theta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "IOUP transition requires theta > 0");
  }
  if (!(tol > 0.0) || tol > 1e-8) {
    throw Error(ErrorCode::InvalidArgument, "series tolerance must lie in (0, 1e-8]");
  }
  const int n = q + 1;
  const double x = theta * h;
  TransitionModel tm{h, Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < q; ++j) {
      tm.A(i, j) = std::pow(h, j - i) / factorial(j - i);
    }
    tm.A(i, q) = std::pow(h, q - i) * exp_remainder(q - i, x);
  }

  // Substituting k = (q-i)+a, l = (q-j)+b and grouping by s = a+b:
  //   Q_ij = sigma^2 h^N0 sum_s (-x)^s / (N0+s) * sum_{a=0}^{s} 1/((q-i+a)! (q-j+s-a)!)
  // with N0 = 2q+1-i-j. The inner sum is C(M, q-i+a)/M! summed, so it is
  // bounded by 2^M/M! (M = 2q-i-j+s); once 2x/(M+1) <= 1/2 the tail from s on
  // is at most twice the bound of term s.
  const std::vector<double> inv_fact = inverse_factorials(2 * q + kMaxSeriesTerms + 2);
  const double s2 = sigma * sigma;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const int ni = q - i;
      const int nj = q - j;
      const int n0 = 2 * q + 1 - i - j;
      double sum = 0.0;
      double x_pow = 1.0;  // x^s
      bool converged = false;
      for (int s = 0; s <= kMaxSeriesTerms; ++s) {
        const int m = ni + nj + s;
        const double bound = x_pow * std::ldexp(1.0, std::min(m, 1000)) *
                             inv_fact[static_cast<std::size_t>(m)] / (n0 + s);
        if (s > 0 && 2.0 * x / (m + 1) <= 0.5 && 2.0 * bound <= tol * std::abs(sum)) {
          converged = true;
          break;
        }
        double inner = 0.0;
        for (int a = 0; a <= s; ++a) {
          inner += inv_fact[static_cast<std::size_t>(ni + a)] *
                   inv_fact[static_cast<std::size_t>(nj + s - a)];
        }
        const double sign = (s % 2 == 0) ? 1.0 : -1.0;
        sum += sign * x_pow * inner / (n0 + s);
        if (!std::isfinite(sum)) {
          break;
        }
        x_pow *= x;
      }
      if (!converged) {
        throw Error(ErrorCode::NonConvergence,
                    "IOUP covariance series did not converge within 1000 terms (theta*h = " +
                        std::to_string(x) + ")");
      }
      tm.Q(i, j) = s2 * std::pow(h, n0) * sum;
      tm.Q(j, i) = tm.Q(i, j);
    }
  }
  return tm;
}

TransitionModel transition_oracle(const Matrix& F, const Matrix& L, double sigma, double h) {
  check_step(h);
  if (F.rows() != F.cols() || L.rows() != F.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "oracle requires square F and conforming L");
  }
  const Eigen::Index n = F.rows();
  // Q is linear in sigma^2, so the block exponential is taken with unit scale
  // to keep its norm (and the number of squarings) independent of sigma.
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = F * h;
  block.topRightCorner(n, n) = L * L.transpose() * h;
  block.bottomRightCorner(n, n) = -F.transpose() * h;
  const Matrix e = linalg::expm(block);
  TransitionModel tm;
  tm.h = h;
  tm.A = e.topLeftCorner(n, n);
  tm.Q = sigma * sigma * linalg::symmetrized(e.topRightCorner(n, n) * tm.A.transpose());
  return tm;
}

TransitionModel transition_oracle(const Matrix& F, const Vector& L, double sigma, double h) {
  return transition_oracle(F, Matrix(L), sigma, h);
}

Matrix drift_matrix(const PriorSpec& prior) {
  Vector a = Vector::Zero(prior.q + 1);
  a(prior.q) = -prior.theta;
  return companion_matrix(prior.q, a);
}

Vector diffusion_vector(int q) {
  check_order(q);
  Vector L = Vector::Zero(q + 1);
  L(q) = 1.0;
  return L;
}

TransitionModel transition(const PriorSpec& prior, double h) {
  prior.validate();
  if (prior.kind == PriorKind::IBM) {
    return ibm_transition(prior.q, prior.sigma, h);
  }
  return ioup_transition(prior.q, prior.theta, prior.sigma, h);
}

MultiDimDrift kron_extend(const Matrix& Kx, const Matrix& Keps, const PriorSpec& prior) {
  if (Kx.rows() != Kx.cols() || Keps.rows() != Keps.cols() || Kx.rows() != Keps.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "Kx and Keps must be square and of equal size");
  }
  MultiDimDrift out;
  out.Kx = Kx;
  out.Keps = Keps;
  out.F_big = linalg::kron(Kx, drift_matrix(prior));
  out.L_big = linalg::kron(Keps, Matrix(diffusion_vector(prior.q)));
  return out;
}

}  // namespace odefilter

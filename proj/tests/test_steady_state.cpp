#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "odefilter/error.hpp"
#include "odefilter/prior.hpp"
#include "odefilter/steady_state.hpp"

using namespace odefilter;

namespace {

Matrix as_posterior(const SteadyState& s, double P00) {
  Matrix P(2, 2);
  P << P00, s.P01, s.P01, s.P11;
  return P;
}

Matrix random_psd(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix B(2, 2);
  B << n(rng), n(rng), n(rng), n(rng);
  return scale * B * B.transpose();
}

}  // namespace

TEST(ClosedForm, ZeroNoise) {
  const double h = 0.2;
  const double sigma = 1.5;
  const SteadyState s = closed_form(h, sigma, 0.0);
  EXPECT_NEAR(s.P11_pred, sigma * sigma * h, 1e-15);
  EXPECT_EQ(s.P11, 0.0);
  EXPECT_NEAR(s.beta0, h / 2.0, 1e-16);
  EXPECT_EQ(s.beta1, 1.0);
  EXPECT_NEAR(s.P01_pred, sigma * sigma * h * h / 2.0, 1e-15);
  EXPECT_EQ(s.P01, 0.0);
}

TEST(ClosedForm, MatchesOrbitLimit) {
  const SteadyState cf = closed_form(0.1, 1.0, 0.001);
  const OrbitLimit lim = orbit_limit(0.1, 1.0, 0.001);
  EXPECT_TRUE(lim.converged);
  EXPECT_LT(max_discrepancy(cf, lim.state), 1e-12);
}

TEST(ClosedForm, Invariants) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lh(-4.0, 0.0);
  std::uniform_real_distribution<double> ls(-1.0, 2.0);
  std::uniform_real_distribution<double> lr(-6.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    const double h = std::pow(10.0, lh(rng));
    const double sigma = std::pow(10.0, ls(rng));
    const double R = k % 10 == 0 ? 0.0 : std::pow(10.0, lr(rng));
    const SteadyState s = closed_form(h, sigma, R);
    EXPECT_GE(s.P11_pred, 0.0);
    EXPECT_GE(s.P11, 0.0);
    EXPECT_GE(s.P01_pred, 0.0);
    EXPECT_GE(s.P01, 0.0);
    EXPECT_GE(s.beta1, 0.0);
    EXPECT_LE(s.beta1, 1.0);
    EXPECT_NEAR(s.P01, R * s.beta0, 1e-12 * std::max(1.0, s.P01));
    EXPECT_NEAR(s.P11, R * s.beta1, 1e-12 * std::max(1.0, s.P11));
    EXPECT_NEAR(s.P11_pred, s.P11 + sigma * sigma * h, 1e-12 * s.P11_pred);
  }
}

TEST(DareOrbit, FirstStepGain) {
  const auto orbit = dare_orbit(0.1, std::sqrt(10.0), 0.0, Matrix::Zero(2, 2), 1);
  ASSERT_EQ(orbit.size(), 1U);
  EXPECT_NEAR(orbit[0].beta(0), 1.0 / 20.0, 1e-15);
  EXPECT_NEAR(orbit[0].beta(1), 1.0, 1e-15);
  EXPECT_LT((orbit[0].P_pred - ibm_transition(1, std::sqrt(10.0), 0.1).Q).norm(), 1e-15);
}

TEST(DareOrbit, FixedPointIsStationary) {
  for (double R : {0.0, 1e-3, 0.5, 20.0}) {
    const double h = 0.05;
    const double sigma = 2.0;
    const SteadyState cf = closed_form(h, sigma, R);
    // Any P00 works: the q = 1 recursion never feeds P00 back into the other entries.
    const auto orbit = dare_orbit(h, sigma, R, as_posterior(cf, 1.0), 30);
    for (const CovarianceStep& step : orbit) {
      EXPECT_LT(max_discrepancy(read_steady_quantities(step, h, sigma, R), cf), 1e-13) << R;
    }
  }
}

TEST(DareOrbit, ConvergesFromDiagonalStart) {
  const auto orbit = dare_orbit(0.1, 1.0, 0.01, Matrix::Identity(2, 2), 200);
  const SteadyState cf = closed_form(0.1, 1.0, 0.01);
  EXPECT_LT(max_discrepancy(read_steady_quantities(orbit.back(), 0.1, 1.0, 0.01), cf), 1e-10);
}

TEST(DareOrbit, MonotoneContraction) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const double h = 0.05;
    const double sigma = 1.0;
    const double R = 0.02;
    const SteadyState cf = closed_form(h, sigma, R);
    const auto orbit = dare_orbit(h, sigma, R, random_psd(rng, 3.0), 200);
    double previous = std::numeric_limits<double>::infinity();
    for (const CovarianceStep& s : orbit) {
      const double gap = std::abs(s.P_pred(1, 1) - cf.P11_pred);
      if (gap < 1e-14) {
        break;
      }
      EXPECT_LT(gap, previous) << trial;
      previous = gap;
    }
  }
}

TEST(OrderBounds, PredictedExponents) {
  const auto p1 = predicted_exponents(1.0);
  EXPECT_EQ(p1, (std::array<double, 5>{1, 1, 2, 1, 0}));
  const auto p3 = predicted_exponents(3.0);
  EXPECT_EQ(p3, (std::array<double, 5>{1, 3, 4, 1, 2}));
  const auto half = predicted_exponents(0.5);
  EXPECT_EQ(half, (std::array<double, 5>{0.75, 0.75, 1.5, 1, 0}));
}

TEST(OrderBounds, FittedSlopes) {
  std::vector<double> grid;
  for (int k = 0; k < 8; ++k) {
    grid.push_back(0.1 * std::pow(2.0, -k));
  }
  for (double p : {1.0, 2.0, 3.0}) {
    const OrderBoundReport rep = verify_order_bounds(grid, 1.0, p, 1.0);
    for (const OrderBoundQuantity& q : rep.quantities) {
      EXPECT_FALSE(q.exact_zero);
      EXPECT_NEAR(q.fitted, q.predicted, 0.15) << "p=" << p << ' ' << q.name;
    }
  }
}

TEST(OrderBounds, ZeroNoiseFlagsExactZero) {
  std::vector<double> grid{0.1, 0.03, 0.01, 0.003, 0.001};
  const OrderBoundReport rep =
      verify_order_bounds(grid, 1.0, std::numeric_limits<double>::infinity(), 1.0);
  EXPECT_TRUE(rep.quantities[4].exact_zero);
  EXPECT_TRUE(std::isnan(rep.quantities[4].fitted));
  EXPECT_FALSE(rep.quantities[0].exact_zero);
  EXPECT_NEAR(rep.quantities[0].fitted, 1.0, 1e-6);
}

TEST(OrderBounds, GridChecks) {
  auto code = [](const std::vector<double>& g) {
    try {
      (void)verify_order_bounds(g, 1.0, 1.0, 1.0);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code({0.1, 0.01, 0.001}), ErrorCode::InsufficientGrid);
  EXPECT_EQ(code({0.1, 0.05, 0.02, 0.01}), ErrorCode::InsufficientGrid);
  EXPECT_EQ(code({0.1, 0.01, 0.05, 0.001}), ErrorCode::InsufficientGrid);
}

#include <gtest/gtest.h>

#include <cmath>

#include "odefilter/diagnostics.hpp"
#include "odefilter/error.hpp"
#include "odefilter/filter.hpp"

using namespace odefilter;

namespace {

constexpr double kGolden = 1e-14;

PriorSpec riccati_prior() { return PriorSpec::ibm(1, std::sqrt(10.0)); }

}  // namespace

TEST(Initialize, Exact) {
  const Belief b = initialize(riccati(), riccati_prior(), 0.1, ExactInit{});
  EXPECT_EQ(b.m(0, 0), 1.0);
  EXPECT_EQ(b.m(1, 0), -0.5);
  EXPECT_EQ(b.P.front().norm(), 0.0);

  const Belief l = initialize(logistic(), PriorSpec::ibm(1, 1.0), 0.1, ExactInit{});
  EXPECT_NEAR(l.m(0, 0), 0.1, 1e-16);
  EXPECT_NEAR(l.m(1, 0), 0.27, 1e-16);
}

TEST(Initialize, PerturbedZeroIsExact) {
  const Belief a = initialize(logistic(), PriorSpec::ibm(2, 1.0), 0.1, PerturbedInit{0.0, 9});
  const Belief b = initialize(logistic(), PriorSpec::ibm(2, 1.0), 0.1, ExactInit{});
  EXPECT_EQ(a.m, b.m);
  EXPECT_EQ(a.P.front(), b.P.front());
}

TEST(Initialize, PerturbedEnvelope) {
  const double h = 0.05;
  const double K0 = 0.3;
  const int q = 2;
  const IVProblem p = linear_rotation();
  const Belief exact = initialize(p, PriorSpec::ibm(q, 1.0), h, ExactInit{});
  const Belief b = initialize(p, PriorSpec::ibm(q, 1.0), h, PerturbedInit{K0, 42});
  for (int i = 0; i <= q; ++i) {
    for (int j = 0; j < p.d; ++j) {
      EXPECT_LE(std::abs(b.m(i, j) - exact.m(i, j)), K0 * std::pow(h, q + 1 - i));
    }
  }
  EXPECT_NE(b.m, exact.m);
  const Belief again = initialize(p, PriorSpec::ibm(q, 1.0), h, PerturbedInit{K0, 42});
  EXPECT_EQ(again.m, b.m);
  EXPECT_EQ(b.P[0], b.P[0].transpose());
  EXPECT_GE(linalg::min_eigenvalue(b.P[0]), -1e-12 * b.P[0].trace());
}

TEST(Initialize, MissingDerivative) {
  IVProblem p = riccati();
  p.derivatives.resize(2);
  try {
    (void)initialize(p, PriorSpec::ibm(2, 1.0), 0.1, ExactInit{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingDerivative);
  }
}

TEST(Predict, RiccatiFirstStep) {
  const TransitionModel tm = ibm_transition(1, std::sqrt(10.0), 0.1);
  const Belief b = initialize(riccati(), riccati_prior(), 0.1, ExactInit{});
  const Belief pred = predict(b, tm);
  EXPECT_NEAR(pred.m(0, 0), 19.0 / 20.0, kGolden);
  EXPECT_NEAR(pred.m(1, 0), -0.5, kGolden);
  EXPECT_NEAR(pred.P[0](0, 0), 1.0 / 300.0, kGolden);
  EXPECT_NEAR(pred.P[0](0, 1), 1.0 / 20.0, kGolden);
  EXPECT_NEAR(pred.P[0](1, 1), 1.0, kGolden);
}

TEST(Predict, IdentityIsNoOp) {
  Belief b;
  b.m = Matrix::Random(3, 2);
  b.P = {Matrix::Identity(3, 3), 2.0 * Matrix::Identity(3, 3)};
  const TransitionModel tm{0.1, Matrix::Identity(3, 3), Matrix::Zero(3, 3)};
  const Belief pred = predict(b, tm);
  EXPECT_EQ(pred.m, b.m);
  EXPECT_EQ(pred.P[0], b.P[0]);
  EXPECT_EQ(pred.P[1], b.P[1]);
}

TEST(EvaluateData, Cases) {
  Matrix m(2, 1);
  m << 19.0 / 20.0, -0.5;
  EXPECT_NEAR(evaluate_data(riccati().f, m)(0), -6859.0 / 16000.0, kGolden);
  const IVProblem c = constant_field(Vector::Constant(1, 2.0), Vector::Zero(1), 1.0);
  m << 123.0, 4.0;
  EXPECT_EQ(evaluate_data(c.f, m)(0), 2.0);
  m << 1.0, 0.0;
  EXPECT_EQ(evaluate_data(logistic().f, m)(0), 0.0);
  m << std::nan(""), 0.0;
  EXPECT_THROW((void)evaluate_data(logistic().f, m), Error);
}

TEST(Gain, Cases) {
  Matrix P(2, 2);
  P << 1.0 / 300.0, 1.0 / 20.0, 1.0 / 20.0, 1.0;
  const Vector b = gain(P, 0.0);
  EXPECT_NEAR(b(0), 1.0 / 20.0, kGolden);
  EXPECT_NEAR(b(1), 1.0, kGolden);
  EXPECT_LT(gain(P, 1e300).cwiseAbs().maxCoeff(), 1e-299);
  EXPECT_DOUBLE_EQ(gain(P, P(1, 1))(1), 0.5);
  try {
    (void)gain(Matrix::Zero(2, 2), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularInnovation);
  }
}

TEST(Update, RiccatiFirstStep) {
  const Belief b = initialize(riccati(), riccati_prior(), 0.1, ExactInit{});
  const Belief pred = predict(b, ibm_transition(1, std::sqrt(10.0), 0.1));
  const Vector y = evaluate_data(riccati().f, pred.m);
  const UpdateResult up = update(pred, y, 0.0);
  EXPECT_NEAR(up.record.r(0), 1141.0 / 16000.0, kGolden);
  EXPECT_NEAR(up.posterior.m(0, 0), 305141.0 / 320000.0, kGolden);
  EXPECT_NEAR(up.posterior.m(1, 0), -6859.0 / 16000.0, kGolden);
  EXPECT_EQ(up.posterior.m(1, 0), y(0));
}

TEST(Update, ZeroResidualKeepsMean) {
  Belief pred;
  pred.m = Matrix(3, 1);
  pred.m << 0.3, -1.2, 0.7;
  pred.P = {ibm_transition(2, 1.0, 0.2).Q};
  const UpdateResult up = update(pred, Vector::Constant(1, -1.2), 0.05);
  EXPECT_EQ(up.posterior.m, pred.m);
}

TEST(Update, CovarianceGainIdentities) {
  Belief pred;
  pred.m = Matrix::Zero(2, 1);
  pred.P = {ibm_transition(1, 2.0, 0.3).Q};
  const double R = 0.17;
  const UpdateResult up = update(pred, Vector::Zero(1), R);
  EXPECT_NEAR(up.posterior.P[0](0, 1), R * up.record.beta(0, 0), 1e-12);
  EXPECT_NEAR(up.posterior.P[0](1, 1), R * up.record.beta(1, 0), 1e-12);
}

TEST(Solve, RiccatiHeadMatchesGoldens) {
  const Trajectory traj = solve(riccati(), riccati_prior(), 0.1, NoiseModel::zero());
  ASSERT_EQ(traj.steps(), 10U);
  const StepRecord& r = traj.records.front();
  EXPECT_NEAR(r.t, 0.1, 1e-15);
  EXPECT_NEAR(r.m_pred(0, 0), 19.0 / 20.0, kGolden);
  EXPECT_NEAR(r.m_pred(1, 0), -0.5, kGolden);
  EXPECT_NEAR(r.P_pred[0](0, 0), 1.0 / 300.0, kGolden);
  EXPECT_NEAR(r.P_pred[0](0, 1), 1.0 / 20.0, kGolden);
  EXPECT_NEAR(r.P_pred[0](1, 0), 1.0 / 20.0, kGolden);
  EXPECT_NEAR(r.P_pred[0](1, 1), 1.0, kGolden);
  EXPECT_NEAR(r.y(0), -6859.0 / 16000.0, kGolden);
  EXPECT_NEAR(r.beta(0, 0), 1.0 / 20.0, kGolden);
  EXPECT_NEAR(r.beta(1, 0), 1.0, kGolden);
  EXPECT_NEAR(r.r(0), 1141.0 / 16000.0, kGolden);
  EXPECT_NEAR(r.m(0, 0), 305141.0 / 320000.0, kGolden);
  EXPECT_NEAR(r.m(1, 0), -6859.0 / 16000.0, kGolden);
}

TEST(Solve, MisalignmentAfterFirstStep) {
  const Trajectory zero = solve(riccati(), riccati_prior(), 0.1, NoiseModel::zero());
  EXPECT_NEAR(misalignment(zero, riccati(), 1)[1], 0.00485, 5e-5);
  const Trajectory one = solve(riccati(), riccati_prior(), 0.1, NoiseModel::constant(1.0));
  EXPECT_NEAR(misalignment(one, riccati(), 1)[1], 0.03324, 5e-6);
}

TEST(Solve, ConstantFieldIsExact) {
  Vector c(2);
  c << 1.5, -0.25;
  Vector x0(2);
  x0 << 0.5, 2.0;
  const IVProblem p = constant_field(c, x0, 1.0);
  for (int q = 1; q <= 3; ++q) {
    for (double h : {0.5, 0.125, 0.01}) {
      const Trajectory t = solve(p, PriorSpec::ibm(q, 3.0), h, NoiseModel::zero());
      for (std::size_t n = 0; n < t.steps(); ++n) {
        const StepRecord& r = t.records[n];
        EXPECT_EQ(r.r.norm(), 0.0);
        const Vector expect = x0 + c * static_cast<double>(n + 1) * h;
        EXPECT_LT((r.m.row(0).transpose() - expect).norm(), 1e-13);
      }
    }
  }
}

TEST(Solve, ConstantFieldIoup) {
  const IVProblem p = constant_field(Vector::Constant(1, 2.0), Vector::Zero(1), 1.0);
  const Trajectory q2 = solve(p, PriorSpec::ioup(2, 1.5, 1.0), 0.1, NoiseModel::zero());
  EXPECT_NEAR(q2.final_belief().m(0, 0), 2.0, 1e-13);
  // q = 1: the drift pulls the predicted slope to 2 exp(-theta h)
  const Trajectory q1 = solve(p, PriorSpec::ioup(1, 1.5, 1.0), 0.1, NoiseModel::zero());
  EXPECT_NEAR(q1.records.front().r(0), 2.0 * (1.0 - std::exp(-0.15)), 1e-14);
}

TEST(Solve, RefinementReducesError) {
  const IVProblem p = logistic();
  const Trajectory coarse = solve(p, PriorSpec::ibm(1, 1.0), 0.1, NoiseModel::zero());
  const Trajectory fine = solve(p, PriorSpec::ibm(1, 1.0), 0.01, NoiseModel::zero());
  const double e_coarse = global_error(coarse, p).eps0_norm.back();
  const double e_fine = global_error(fine, p).eps0_norm.back();
  EXPECT_LT(e_fine * 50.0, e_coarse);
}

TEST(Solve, MeshChecks) {
  try {
    (void)solve(logistic(), PriorSpec::ibm(1, 1.0), 0.07, NoiseModel::zero());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonIntegerMesh);
  }
  EXPECT_THROW((void)solve(logistic(), PriorSpec::ibm(0, 1.0), 0.1, NoiseModel::zero()), Error);
  const Trajectory t = solve(logistic(), PriorSpec::ibm(1, 1.0), 0.01, NoiseModel::zero());
  EXPECT_EQ(t.steps(), 150U);
  for (std::size_t n = 0; n < t.steps(); ++n) {
    EXPECT_NEAR(t.records[n].t, 0.01 * static_cast<double>(n + 1), 1e-15);
  }
}

TEST(Solve, DivergenceIsFlagged) {
  IVProblem p = riccati();
  p.f = [](const Vector& x) {
    Vector y = x;
    y(0) = x(0) < 0.9 ? std::numeric_limits<double>::infinity() : -0.5 * x(0) * x(0) * x(0);
    return y;
  };
  const Trajectory t = solve(p, riccati_prior(), 0.1, NoiseModel::zero());
  EXPECT_TRUE(t.diverged);
  EXPECT_LT(t.steps(), 10U);
  EXPECT_FALSE(t.diverged_reason.empty());
}

TEST(Solve, SharedAndPerDimensionAgree) {
  const IVProblem p = linear_rotation();
  SolveOptions per;
  per.covariance = CovarianceMode::PerDimension;
  const Trajectory a = solve(p, PriorSpec::ibm(2, 1.0), 0.05, NoiseModel::power_law(1.0, 2.0));
  const Trajectory b = solve(p, PriorSpec::ibm(2, 1.0), 0.05, NoiseModel::power_law(1.0, 2.0),
                             ExactInit{}, per);
  ASSERT_EQ(a.steps(), b.steps());
  for (std::size_t n = 0; n < a.steps(); ++n) {
    EXPECT_EQ(a.records[n].m, b.records[n].m);
    EXPECT_EQ(a.records[n].P[0], b.records[n].P[1]);
    EXPECT_EQ(b.records[n].P[0], b.records[n].P[1]);
  }
}

TEST(Solve, PerDimensionSigma) {
  const IVProblem p = linear_rotation();
  PriorSpec prior = PriorSpec::ibm(1, 1.0);
  prior.sigma_per_dim = {1.0, 2.0};
  const Trajectory t = solve(p, prior, 0.1, NoiseModel::zero());
  const Trajectory one = solve(p, PriorSpec::ibm(1, 1.0), 0.1, NoiseModel::zero());
  const Trajectory two = solve(p, PriorSpec::ibm(1, 2.0), 0.1, NoiseModel::zero());
  EXPECT_LT((t.records.back().P[0] - one.records.back().P[0]).norm(), 1e-15);
  EXPECT_LT((t.records.back().P[1] - two.records.back().P[0]).norm(), 1e-13);

  prior.sigma_per_dim = {1.0};
  EXPECT_THROW((void)solve(p, prior, 0.1, NoiseModel::zero()), Error);
}

TEST(Solve, StreamingMatchesHistory) {
  const IVProblem p = logistic();
  const Trajectory full = solve(p, PriorSpec::ibm(2, 1.0), 0.05, NoiseModel::zero());
  std::vector<double> seen;
  SolveOptions opts;
  opts.keep_history = false;
  opts.on_step = [&](const StepRecord& r) { seen.push_back(r.m(0, 0)); };
  const Trajectory lean = solve(p, PriorSpec::ibm(2, 1.0), 0.05, NoiseModel::zero(), ExactInit{}, opts);
  EXPECT_EQ(lean.steps(), 1U);
  EXPECT_EQ(lean.steps_taken, full.steps());
  ASSERT_EQ(seen.size(), full.steps());
  for (std::size_t n = 0; n < seen.size(); ++n) {
    EXPECT_EQ(seen[n], full.records[n].m(0, 0));
  }
  EXPECT_EQ(lean.records.back().m, full.records.back().m);
}

TEST(Solve, IoupPriorRuns) {
  const IVProblem p = logistic();
  const Trajectory t = solve(p, PriorSpec::ioup(2, 0.5, 1.0), 0.01, NoiseModel::zero());
  EXPECT_FALSE(t.diverged);
  EXPECT_LT(global_error(t, p).eps0_norm.back(), 1e-4);
}

TEST(InitMode, ParseAndPrint) {
  EXPECT_TRUE(std::holds_alternative<ExactInit>(parse_init_mode("exact", 0)));
  const InitMode m = parse_init_mode("perturbed:0.001", 5);
  ASSERT_TRUE(std::holds_alternative<PerturbedInit>(m));
  EXPECT_EQ(std::get<PerturbedInit>(m).K0, 0.001);
  EXPECT_EQ(std::get<PerturbedInit>(m).seed, 5U);
  EXPECT_EQ(to_string(m), "perturbed:0.001");
  EXPECT_THROW((void)parse_init_mode("random", 0), Error);
  EXPECT_THROW((void)parse_init_mode("perturbed:-1", 0), Error);
}

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dynmed/error.hpp"
#include "dynmed/regress.hpp"
#include "dynmed/simulator.hpp"
#include "testing.hpp"

using namespace dynmed;

TEST(Ols, ExactLine) {
  Eigen::MatrixXd X(10, 1);
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; ++i) {
    X(i, 0) = i;
    y(i) = 2.0 * i + 1.0;
  }
  const OlsFit f = ols(y, X, true);
  EXPECT_NEAR(f.coefficients(0), 1.0, 1e-12);
  EXPECT_NEAR(f.coefficients(1), 2.0, 1e-12);
  EXPECT_NEAR(f.residual_variance, 0.0, 1e-20);
  EXPECT_EQ(f.design_rank, 2);
  EXPECT_EQ(f.n_used, 10);
}

TEST(Ols, DuplicatedColumnIsRankDeficient) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  Eigen::MatrixXd X(20, 3);
  for (int i = 0; i < 20; ++i) {
    X(i, 0) = z(rng);
    X(i, 1) = z(rng);
    X(i, 2) = X(i, 0);
  }
  Eigen::VectorXd y = Eigen::VectorXd::Random(20);
  try {
    ols(y, X, true);
    FAIL() << "expected RankDeficient";
  } catch (const RankDeficient& e) {
    ASSERT_EQ(e.columns().size(), 1u);
    // one of the two copies (design columns 1 and 3) is reported
    EXPECT_TRUE(e.columns()[0] == 1 || e.columns()[0] == 3);
  }
}

TEST(Ols, TooFewRows) {
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(3, 3);
  EXPECT_THROW(ols(Eigen::VectorXd::Random(3), X, true), RankDeficient);
}

TEST(Ols, MatchesNormalEquations) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Eigen::MatrixXd X(60, 4);
    Eigen::VectorXd y(60);
    for (int i = 0; i < 60; ++i) {
      for (int k = 0; k < 4; ++k) X(i, k) = z(rng);
      y(i) = z(rng);
    }
    const Eigen::VectorXd oracle = check::normal_equations(X, y, true);
    EXPECT_LT((ols(y, X, true).coefficients - oracle).cwiseAbs().maxCoeff(), 1e-10);
    const Eigen::VectorXd oracle0 = check::normal_equations(X, y, false);
    EXPECT_LT((ols(y, X, false).coefficients - oracle0).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Ols, ScaleEquivariance) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  Eigen::MatrixXd X(40, 2);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) {
    X(i, 0) = z(rng);
    X(i, 1) = z(rng);
    y(i) = z(rng);
  }
  const Eigen::VectorXd b = ols(y, X, true).coefficients;
  Eigen::MatrixXd Xs = X;
  Xs.col(1) *= 8.0;  // a power of two keeps the scaled column exact
  const Eigen::VectorXd bs = ols(y, Xs, true).coefficients;
  EXPECT_NEAR(bs(2), b(2) / 8.0, 1e-14);
  EXPECT_NEAR(bs(1), b(1), 1e-13);
}

namespace {

SimConfig two_mediator_config(int n, int T, std::uint64_t seed) {
  SemParams p = SemParams::zeros(2);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 2);
  w(0, 1) = 0.6;
  p.dag = DagStructure(w);
  p.alpha1 << 0.1, -0.2;
  p.delta1 << 0.5, 0.3;
  p.Gamma1 << 0.2, -0.1, 0.15, 0.25;
  p.zeta1 << 0.1, -0.2;
  p.alpha2 = 0.3;
  p.delta2 = 0.4;
  p.gamma2 << -0.2, 0.1;
  p.zeta2 = 0.3;
  p.kappa << 0.5, -0.4;
  SimConfig cfg;
  cfg.n = n;
  cfg.T = T;
  cfg.d = 2;
  cfg.params = {p};
  cfg.seed = seed;
  return cfg;
}

// Largest |estimate - truth| / max(0.02, 3 SE) over the mediator-equation
// treatment effects. The SE uses the model's mediator innovation variance
// diag((I - W^T)^{-1} (I - W)^{-1}) and Var(A) = 1/4.
double delta1_ratio(const SemParams& est, const SemParams& truth, double rows) {
  const int d = truth.d();
  const Eigen::MatrixXd inv =
      (Eigen::MatrixXd::Identity(d, d) - truth.dag.weights().transpose()).inverse();
  const Eigen::VectorXd var = (inv * inv.transpose()).diagonal();
  double worst = 0.0;
  for (int k = 0; k < d; ++k) {
    const double se = std::sqrt(var(k) / (rows * 0.25));
    worst = std::max(worst, std::abs(est.delta1(k) - truth.delta1(k)) / std::max(0.02, 3 * se));
  }
  return worst;
}

}  // namespace

// Stage 1 (no history) of a two-mediator model: the treatment effect on the
// second mediator is the impulse-response of the model. SE of the
// coefficient is about 2 sd(M_2) / sqrt(n).
TEST(WithinStage, TreatmentToSecondMediatorAtStageOne) {
  const SimConfig cfg = two_mediator_config(100000, 1, 5);
  const Panel panel = simulate(cfg);
  const WithinStage w = within_stage_effects(panel, cfg.params[0].dag, 0);
  const auto imp = check::treatment_impulse(cfg.params, 1, 0);
  const double se = 2.0 * std::sqrt(1.0 + 0.36) / std::sqrt(100000.0);
  EXPECT_NEAR(w.theta_A_M(1), imp.m[0](1), 3 * se);
  EXPECT_NEAR(w.theta_A_M(0), imp.m[0](0), 3 * 2.0 / std::sqrt(100000.0));
}

TEST(WithinStage, SeveredOutcomeEdgeGivesZero) {
  SimConfig cfg = two_mediator_config(100000, 2, 6);
  cfg.params[0].kappa.setZero();
  const Panel panel = simulate(cfg);
  for (int t = 0; t < 2; ++t) {
    const WithinStage w = within_stage_effects(panel, cfg.params[0].dag, t);
    EXPECT_LT(w.theta_M_R.cwiseAbs().maxCoeff(), 0.02);
  }
}

// With the parent in the adjustment set the coefficient is the causal
// effect; dropping it leaves the back-door path M_1 <- M_0 -> R open.
TEST(WithinStage, BackdoorAdjustmentMatters) {
  const SimConfig cfg = two_mediator_config(100000, 2, 7);
  const Panel panel = simulate(cfg);
  const auto imp = check::mediator_impulse(cfg.params, 2, 1, 1);
  const WithinStage adjusted = within_stage_effects(panel, cfg.params[0].dag, 1);
  const WithinStage naive = within_stage_effects(panel, DagStructure(2), 1);
  EXPECT_NEAR(adjusted.theta_M_R(1), imp.r[1], 0.02);
  EXPECT_GT(std::abs(naive.theta_M_R(1) - imp.r[1]), 0.1);
  // descendants only; the parent column is zero and the diagonal one
  EXPECT_EQ(adjusted.theta_M_M(0, 1), 0.0);
  EXPECT_EQ(adjusted.theta_M_M(1, 1), 1.0);
  const auto imp0 = check::mediator_impulse(cfg.params, 2, 1, 0);
  EXPECT_NEAR(adjusted.theta_M_M(1, 0), imp0.m[1](1), 0.02);
}

TEST(WithinStage, RankDeficiencyCarriesStage) {
  SimConfig cfg = two_mediator_config(50, 2, 8);
  Panel panel = simulate(cfg);
  // constant treatment at stage 2 makes A collinear with the intercept
  std::vector<double> a = panel.raw_treatments();
  for (int i = 0; i < 50; ++i) a[50 + i] = 1.0;
  const Panel bad(50, 2, 2, a, panel.raw_mediators(), panel.raw_outcomes());
  try {
    within_stage_effects(bad, cfg.params[0].dag, 1);
    FAIL() << "expected RankDeficient";
  } catch (const RankDeficient& e) {
    ASSERT_TRUE(e.stage().has_value());
    EXPECT_EQ(*e.stage(), 1);
  }
}

TEST(FitSemParams, RecoversSingleStage) {
  const auto params = finite_setting(2, 31);
  SimConfig cfg;
  cfg.n = 100000;
  cfg.T = 2;
  cfg.d = 3;
  cfg.params = params;
  cfg.seed = 3;
  const Panel panel = simulate(cfg);
  const SemParams est = fit_sem_params(panel, params[1].dag, 1);
  const SemParams& p = params[1];
  EXPECT_LT(delta1_ratio(est, p, 100000), 1.0);
  EXPECT_LT((est.Gamma1 - p.Gamma1).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_LT((est.zeta1 - p.zeta1).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_LT((est.gamma2 - p.gamma2).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_LT((est.kappa - p.kappa).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_NEAR(est.delta2, p.delta2, 0.02);
  EXPECT_NEAR(est.zeta2, p.zeta2, 0.02);
  EXPECT_LT((est.dag.weights() - p.dag.weights()).cwiseAbs().maxCoeff(), 0.02);
}

TEST(FitSemParams, PooledStationary) {
  SimConfig cfg;
  cfg.n = 100;
  cfg.T = 500;
  cfg.d = 3;
  cfg.params = {stationary_setting(2024)};
  cfg.burn_in = 5;
  cfg.seed = 4;
  const Panel panel = simulate(cfg);
  const SemParams est = fit_sem_params_pooled(panel, cfg.params[0].dag);
  const SemParams& p = cfg.params[0];
  EXPECT_LT(delta1_ratio(est, p, 100.0 * 499), 1.0);
  EXPECT_LT((est.Gamma1 - p.Gamma1).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_LT((est.kappa - p.kappa).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_NEAR(est.zeta2, p.zeta2, 0.02);
  EXPECT_LT((est.gamma2 - p.gamma2).cwiseAbs().maxCoeff(), 0.02);
}

// Nearly noiseless data identify Theta almost exactly. The outcome noise is
// far below the mediator noise: kappa is identified by the mediators' own
// innovations, so the two must not vanish at the same rate. Late stages
// are used because early ones have too little history spread.
TEST(FitSemParams, ZeroNoiseRecovery) {
  const auto params = finite_setting(10, 5);
  SimConfig cfg;
  cfg.n = 300;
  cfg.T = 10;
  cfg.d = 3;
  cfg.params = params;
  cfg.noise_sd_mediator = 1e-8;
  cfg.noise_sd_outcome = 1e-14;
  cfg.seed = 9;
  const Panel panel = simulate(cfg);
  const SemParams est = fit_sem_params(panel, params[8].dag, 8);
  const SemParams& p = params[8];
  EXPECT_LT((est.alpha1 - p.alpha1).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((est.delta1 - p.delta1).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((est.Gamma1 - p.Gamma1).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((est.zeta1 - p.zeta1).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(est.alpha2, p.alpha2, 1e-6);
  EXPECT_NEAR(est.delta2, p.delta2, 1e-6);
  EXPECT_NEAR(est.zeta2, p.zeta2, 1e-6);
  EXPECT_LT((est.gamma2 - p.gamma2).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((est.kappa - p.kappa).cwiseAbs().maxCoeff(), 1e-6);
}

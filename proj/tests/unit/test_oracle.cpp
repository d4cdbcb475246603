#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "dynmed/effects_finite.hpp"
#include "dynmed/error.hpp"
#include "dynmed/oracle.hpp"
#include "dynmed/simulator.hpp"
#include "testing.hpp"

using namespace dynmed;

namespace {

double edge_weight(const UnrolledGraph& g, int from, int to) {
  for (const auto& e : g.edges())
    if (e.from == from && e.to == to) return e.weight;
  return 0.0;
}

std::set<std::pair<int, int>> edge_set(const UnrolledGraph& g) {
  std::set<std::pair<int, int>> out;
  for (const auto& e : g.edges()) out.insert({e.from, e.to});
  return out;
}

SemParams two_mediator_stage() {
  SemParams p = check::random_params(2, 1, 3, 0.8, 1.0)[0];
  for (int k = 0; k < 2; ++k)
    if (std::abs(p.delta1(k)) < 0.1) p.delta1(k) = 0.4;
  return p;
}

}  // namespace

TEST(Unroll, SingleStageTwoMediatorEdges) {
  const SemParams p = two_mediator_stage();
  ASSERT_TRUE(p.dag.has_edge(0, 1));
  const UnrolledGraph g = unroll({p}, 1);
  EXPECT_EQ(g.size(), 4);
  const int a = g.treatment(0), m1 = g.mediator(0, 0), m2 = g.mediator(0, 1), r = g.outcome(0);
  const std::set<std::pair<int, int>> expect{{a, m1}, {a, m2}, {a, r}, {m1, m2}, {m1, r}, {m2, r}};
  EXPECT_EQ(edge_set(g), expect);
  EXPECT_EQ(edge_weight(g, m1, m2), p.dag.weights()(0, 1));
  EXPECT_EQ(edge_weight(g, m1, r), p.kappa(0));
  EXPECT_EQ(edge_weight(g, a, r), p.delta2);
}

TEST(Unroll, NodeCountAndCrossStageEdges) {
  for (int d = 1; d <= 3; ++d)
    for (int T = 1; T <= 4; ++T) EXPECT_EQ(unroll(check::random_params(d, T, 1), T).size(), T * (d + 2));
  const auto ps = check::random_params(2, 2, 8, 0.5, 0.0);  // W = 0
  const UnrolledGraph g = unroll(ps, 2);
  EXPECT_EQ(edge_weight(g, g.mediator(0, 1), g.mediator(1, 0)), ps[1].Gamma1(0, 1));
  EXPECT_EQ(edge_weight(g, g.outcome(0), g.mediator(1, 1)), ps[1].zeta1(1));
  EXPECT_EQ(edge_weight(g, g.mediator(0, 0), g.outcome(1)), ps[1].gamma2(0));
  EXPECT_EQ(edge_weight(g, g.outcome(0), g.outcome(1)), ps[1].zeta2);
  EXPECT_EQ(edge_weight(g, g.treatment(1), g.mediator(1, 1)), ps[1].delta1(1));
  // topological order respects every edge
  std::vector<int> pos(g.size());
  for (int i = 0; i < g.size(); ++i) pos[g.topological()[i]] = i;
  for (const auto& e : g.edges()) EXPECT_LT(pos[e.from], pos[e.to]);
}

TEST(Unroll, ZeroParametersGiveNoEdges) {
  const UnrolledGraph g = unroll({SemParams::zeros(3)}, 3);
  EXPECT_EQ(g.size(), 15);
  EXPECT_TRUE(g.edges().empty());
}

// The four paths from A_1 to R_1 in the two-mediator stage, with the
// treatment edges read off the graph.
TEST(PathTotalEffect, FourPathsOfTheFirstStage) {
  const SemParams p = two_mediator_stage();
  const UnrolledGraph g = unroll({p}, 1);
  const int a = g.treatment(0), m1 = g.mediator(0, 0), m2 = g.mediator(0, 1), r = g.outcome(0);
  const double d11 = edge_weight(g, a, m1), d12 = edge_weight(g, a, m2);
  const double w12 = p.dag.weights()(0, 1);
  const double expect = p.delta2 + d11 * p.kappa(0) + d12 * p.kappa(1) + d11 * w12 * p.kappa(1);
  EXPECT_NEAR(path_total_effect(g, a, r), expect, 1e-15);
  // blocking M_12 removes exactly the paths through it
  const double through = path_total_effect(g, a, m2) * path_total_effect(g, m2, r);
  EXPECT_NEAR(path_total_effect(g, a, r, {m2}), expect - through, 1e-15);
  // and the total effect equals the impulse response of the model
  EXPECT_NEAR(path_total_effect(g, a, r), check::treatment_impulse({p}, 1, 0).r[0], 1e-14);
}

TEST(PathTotalEffect, DynamicProgrammingMatchesEnumeration) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ps = check::random_params(2, 2, 300 + seed, 0.7);
    const UnrolledGraph g = unroll(ps, 2);
    ASSERT_LE(g.size(), 14);
    for (int src = 0; src < g.size(); ++src)
      for (int dst = src + 1; dst < g.size(); ++dst) {
        const double dp = path_total_effect(g, src, dst);
        const double en = path_total_effect(g, src, dst, {}, PathMode::enumerate);
        EXPECT_NEAR(dp, en, 1e-12);
        const std::vector<int> blocked{g.mediator(0, 1), g.mediator(1, 1)};
        EXPECT_NEAR(path_total_effect(g, src, dst, blocked),
                    path_total_effect(g, src, dst, blocked, PathMode::enumerate), 1e-12);
      }
  }
}

TEST(PathTotalEffect, EnumerationRefusesLargeGraphs) {
  const UnrolledGraph g = unroll(check::random_params(3, 3, 1), 3);
  EXPECT_THROW(path_total_effect(g, 0, g.outcome(2), {}, PathMode::enumerate), ValidationError);
}

TEST(PathTotalEffect, NoPathIsZero) {
  const UnrolledGraph g = unroll(check::random_params(2, 2, 1), 2);
  EXPECT_EQ(path_total_effect(g, g.outcome(1), g.treatment(0)), 0.0);
  EXPECT_EQ(path_total_effect(g, g.treatment(1), g.outcome(0)), 0.0);
}

TEST(TrueEta, MatchesDefinitionRollouts) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int d = 1 + seed % 3, T = 1 + seed % 5;
    const auto ps = check::random_params(d, T, 40 + seed);
    for (int j = 0; j < d; ++j)
      EXPECT_LT((true_eta_finite(ps, T, j) - check::definition_eta(ps, T, j)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(TrueEta, SingleStageProductAndDisconnectedOutcome) {
  auto ps = check::random_params(3, 1, 12);
  const WithinStage w = analytic_within_stage(ps[0]);
  for (int j = 0; j < 3; ++j)
    EXPECT_NEAR(true_eta_finite(ps, 1, j)(0), w.theta_A_M(j) * w.theta_M_R(j), 1e-14);
  ps = check::random_params(3, 4, 13);
  for (auto& p : ps) {
    p.kappa.setZero();
    p.gamma2.setZero();
  }
  for (int j = 0; j < 3; ++j) EXPECT_EQ(true_eta_finite(ps, 4, j).cwiseAbs().maxCoeff(), 0.0);
}

TEST(TrueReport, IdentitiesHold) {
  const auto ps = check::random_params(3, 5, 14);
  const MediationReport rep = true_report_finite(ps, 5);
  EXPECT_LT(rep.identity_violation(), 1e-12);
}

TEST(MonteCarlo, ZeroParametersGiveZero) {
  McOptions opt;
  opt.rollouts = 20000;
  opt.seed = 1;
  const McEstimate mc = mc_eta_all({SemParams::zeros(2)}, 3, opt);
  for (int t = 0; t < 3; ++t)
    for (int j = 0; j < 2; ++j)
      EXPECT_LE(std::abs(mc.estimate(t, j)), 3 * mc.mc_se(t, j) + 1e-15);
}

TEST(MonteCarlo, AgreesWithPathOracle) {
  const auto ps = check::random_params(3, 5, 15);
  McOptions opt;
  opt.rollouts = 200000;
  opt.seed = 2;
  const McEstimate mc = mc_eta_all(ps, 5, opt);
  const MediationReport truth = true_report_finite(ps, 5);
  for (int t = 0; t < 5; ++t)
    for (int j = 0; j < 3; ++j)
      EXPECT_LE(std::abs(mc.estimate(t, j) - truth.eta(t, j)), 3.5 * mc.mc_se(t, j)) << t << j;
}

TEST(MonteCarlo, InvariantToMediatorValue) {
  const auto ps = check::random_params(2, 3, 16);
  McOptions opt;
  opt.rollouts = 100000;
  opt.seed = 3;
  const McEstimate a = mc_eta_all(ps, 3, opt);
  opt.mediator_value = 1.0;
  opt.seed = 4;
  const McEstimate b = mc_eta_all(ps, 3, opt);
  const Eigen::MatrixXd se = (a.mc_se.cwiseAbs2() + b.mc_se.cwiseAbs2()).cwiseSqrt();
  for (int t = 0; t < 3; ++t)
    for (int j = 0; j < 2; ++j) EXPECT_LE(std::abs(a.estimate(t, j) - b.estimate(t, j)), 3 * se(t, j));
}

// Long stationary run: eta^(T) at T = 500 is the closed form up to O(1/T).
TEST(MonteCarlo, LongRunNearClosedForm) {
  const SemParams p = stationary_setting(5, 0.7);
  McOptions opt;
  opt.rollouts = 4000;
  opt.seed = 5;
  opt.burn_in = 5;
  const int T = 500;
  const McEstimate mc = mc_eta_all({p}, T, opt);
  const Eigen::VectorXd limit = true_eta_infinite(p);
  const MediationReport exact = finite_eta_stationary(p, analytic_within_stage(p), T);
  for (int j = 0; j < 3; ++j) {
    EXPECT_LE(std::abs(mc.estimate(T - 1, j) - exact.eta(T - 1, j)), 3 * mc.mc_se(T - 1, j));
    EXPECT_LE(std::abs(mc.estimate(T - 1, j) - limit(j)),
              3 * mc.mc_se(T - 1, j) + std::abs(exact.eta(T - 1, j) - limit(j)));
  }
}

TEST(MonteCarlo, RejectsBadOptions) {
  McOptions opt;
  opt.rollouts = 1;
  EXPECT_THROW(mc_eta_all({SemParams::zeros(1)}, 2, opt), ValidationError);
}

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "dynmed/dag.hpp"
#include "dynmed/effect_table.hpp"
#include "dynmed/error.hpp"
#include "dynmed/model.hpp"
#include "dynmed/panel.hpp"
#include "dynmed/simulator.hpp"
#include "testing.hpp"

using namespace dynmed;

namespace {

RawPanel small_raw() {
  RawPanel raw;
  raw.d = 2;
  raw.treatments = {{1, 0, 1}, {0, 0, 1}};
  raw.outcomes = {{0.5, 1.5, 2.5}, {-1, 0, 1}};
  raw.mediators = {{{1, 2}, {3, 4}, {5, 6}}, {{7, 8}, {9, 10}, {11, 12}}};
  return raw;
}

}  // namespace

TEST(Panel, ValidatesConsistentArrays) {
  const Panel p = validate_panel(small_raw());
  EXPECT_EQ(p.n(), 2);
  EXPECT_EQ(p.T(), 3);
  EXPECT_EQ(p.d(), 2);
  EXPECT_EQ(p.treatment(0, 2), 1.0);
  EXPECT_EQ(p.mediator(1, 1, 0), 9.0);
  EXPECT_EQ(p.outcome(1, 0), -1.0);
  EXPECT_EQ(p.stage_mediators(2)(1, 1), 12.0);
}

TEST(Panel, MediatorDepthMismatch) {
  RawPanel raw = small_raw();
  raw.mediators[0][1] = {1, 2, 3};
  EXPECT_THROW(validate_panel(raw), DimensionMismatch);
}

TEST(Panel, RaggedStagesMismatch) {
  RawPanel raw = small_raw();
  raw.outcomes[1].pop_back();
  EXPECT_THROW(validate_panel(raw), DimensionMismatch);
}

TEST(Panel, NonFiniteOutcomeReportsLocation) {
  RawPanel raw = small_raw();
  raw.outcomes[0][1] = std::numeric_limits<double>::quiet_NaN();
  try {
    validate_panel(raw);
    FAIL() << "expected NonFiniteValue";
  } catch (const NonFiniteValue& e) {
    EXPECT_EQ(e.subject(), 0);
    EXPECT_EQ(e.stage(), 1);
  }
}

TEST(Panel, SelectAndPermute) {
  const Panel p = validate_panel(small_raw());
  const std::vector<int> idx{1, 1, 0};
  const Panel q = p.select_subjects(idx);
  EXPECT_EQ(q.n(), 3);
  EXPECT_EQ(q.mediator(0, 2, 1), 12.0);
  EXPECT_EQ(q.mediator(2, 2, 1), 6.0);
  const std::vector<int> perm{1, 0};
  const Panel r = p.permute_mediators(perm);
  EXPECT_EQ(r.mediator(0, 0, 0), 2.0);
  EXPECT_EQ(r.mediator(0, 0, 1), 1.0);
}

TEST(Panel, StandardizedHasUnitScale) {
  const Panel p = validate_panel(small_raw()).standardized();
  double mean = 0.0, sq = 0.0;
  for (int i = 0; i < p.n(); ++i)
    for (int t = 0; t < p.T(); ++t) {
      mean += p.outcome(i, t);
      sq += p.outcome(i, t) * p.outcome(i, t);
    }
  mean /= 6;
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR((sq - 6 * mean * mean) / 5, 1.0, 1e-12);  // sample variance
}

TEST(Dag, ReferenceWeightsOrder) {
  const DagStructure dag(reference_weights());
  EXPECT_EQ(dag.order(), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(dag.edge_count(), 3);
  EXPECT_EQ(dag.parents(2), (std::vector<int>{0, 1}));
  EXPECT_EQ(dag.descendants(0), (std::vector<int>{1, 2}));
}

TEST(Dag, EmptyGivesIdentity) {
  EXPECT_EQ(DagStructure(4).order(), (std::vector<int>{0, 1, 2, 3}));
}

TEST(Dag, TwoCycleIsRejected) {
  AdjacencyMatrix adj = AdjacencyMatrix::Constant(2, 2, false);
  adj(0, 1) = adj(1, 0) = true;
  EXPECT_THROW(topological_order(adj), CyclicGraph);
  Eigen::MatrixXd w(2, 2);
  w << 0, 0.5, 0.7, 0;
  EXPECT_THROW(DagStructure{w}, CyclicGraph);
}

TEST(Dag, NonzeroDiagonalRejected) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 2);
  w(1, 1) = 0.3;
  EXPECT_THROW(DagStructure{w}, DimensionMismatch);
}

TEST(Dag, TinyWeightsAreStructuralZeros) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
  w(0, 1) = 1e-9;
  w(1, 2) = 0.4;
  const DagStructure dag(w);
  EXPECT_FALSE(dag.has_edge(0, 1));
  EXPECT_TRUE(dag.has_edge(1, 2));
  EXPECT_EQ(dag.weights()(0, 1), 0.0);
}

// Permuting by the topological order leaves a strictly upper triangular matrix.
TEST(Dag, OrderRoundTripIsUpperTriangular) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 0.9);
    std::bernoulli_distribution e(0.5);
    const int d = 5;
    std::vector<int> hidden{3, 0, 4, 1, 2};
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b)
        if (e(rng)) w(hidden[a], hidden[b]) = u(rng);
    const DagStructure dag(w);
    const auto& ord = dag.order();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b <= a; ++b) EXPECT_EQ(w(ord[a], ord[b]), 0.0);
  }
}

TEST(Model, WithinStageMatchesImpulseOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto params = check::random_params(3, 1, seed);
    const WithinStage w = analytic_within_stage(params[0]);
    const auto a = check::treatment_impulse(params, 1, 0);
    EXPECT_NEAR(w.theta_A_R, a.r[0], 1e-12);
    EXPECT_TRUE(w.theta_A_M.isApprox(a.m[0], 1e-12));
    for (int j = 0; j < 3; ++j) {
      const auto m = check::mediator_impulse(params, 1, 0, j);
      EXPECT_NEAR(w.theta_M_R(j), m.r[0], 1e-12);
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(w.theta_M_M(k, j), m.m[0](k), 1e-12);
    }
  }
}

TEST(Model, TransitionIsOneStepImpulseMap) {
  const auto params = check::random_params(3, 2, 5, 0.5, 0.9, true);
  std::vector<SemParams> same{params[1], params[1]};
  const Eigen::MatrixXd tr = params[1].transition();
  // A unit change in M_0j propagates to (M_1, R_1) through column j.
  for (int j = 0; j < 3; ++j) {
    const auto imp = check::mediator_impulse(same, 2, 0, j);
    Eigen::VectorXd x0(4), x1(4);
    x0 << imp.m[0], imp.r[0];
    x1 << imp.m[1], imp.r[1];
    EXPECT_TRUE((tr * x0).isApprox(x1, 1e-12));
  }
}

TEST(Model, CheckCatchesExtents) {
  SemParams p = SemParams::zeros(3);
  p.kappa.resize(2);
  EXPECT_THROW(p.check(), DimensionMismatch);
}

TEST(Model, ReportIdentities) {
  MediationReport r = MediationReport::zeros(Horizon::finite, 3, 2);
  r.delta << 1, 2, 3, 4, 5, 6;
  r.iime = 0.5 * r.delta;
  r.dime = r.delta - r.iime;
  double acc[2] = {0, 0};
  for (int t = 0; t < 3; ++t)
    for (int j = 0; j < 2; ++j) {
      acc[j] += r.delta(t, j);
      r.eta(t, j) = acc[j] / (t + 1);
    }
  EXPECT_LT(r.identity_violation(), 1e-12);
  r.dime(1, 1) += 1e-3;
  EXPECT_GT(r.identity_violation(), 5e-4);
}

TEST(EffectTable, MissingEntryThrows) {
  EffectTable tab(2, 3);
  EXPECT_FALSE(tab.has(0, 1));
  EXPECT_THROW(tab.A_to_R(0, 1), MissingQuantity);
  tab.set_within_stage(1, WithinStage::zeros(2));
  EXPECT_TRUE(tab.has(1, 1));
  EXPECT_EQ(tab.M_to_M(1, 1)(1, 1), 1.0);
}

#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dynmed/dag_learn.hpp"
#include "dynmed/effect_table.hpp"
#include "dynmed/model.hpp"
#include "dynmed/panel.hpp"
#include "dynmed/regress.hpp"

namespace dynmed {

// Fills (s, t) for every s < t from row t-1 and the parameters of stage t.
// Mediator targets are updated before the outcome, which consumes them.
// Throws MissingQuantity if stage t-1 or the within-stage entry of t is absent.
void propagate_cross_stage(EffectTable& table, const SemParams& params_t, int t);

// theta_{M_sj -> R_t} with M_{s+1,j}, ..., M_tj held fixed, for s = 0..t.
// Filled backwards from s = t, where it is the plain within-stage effect.
Eigen::VectorXd intervened_carryover(const EffectTable& table, int j, int t);

struct FiniteEstimatorState {
  EffectTable table;
  // intervened[t](s, j) = theta_{M_sj -> R_t}^{M_sj, ..., M_tj}
  std::vector<Eigen::MatrixXd> intervened;
  MediationReport report;

  explicit FiniteEstimatorState(EffectTable t);
  // Runs the carryover recursion and the running-average update for stage t.
  // Stages must be advanced in order.
  void advance(int t);

 private:
  int next_ = 0;
  // prefix(i, j) = sum_{s <= i} theta_{A_s -> M_ij}
  Eigen::MatrixXd prefix_;
};

// Runs FiniteEstimatorState over every stage of a complete table.
MediationReport mediation_from_table(const EffectTable& table);

// Effect table implied by true parameters (analytic within-stage effects).
// `params` has length T or 1.
EffectTable true_effect_table(const std::vector<SemParams>& params, int T);

// Immediate theta_{A_t -> M_tj} and delayed sum_{s<t} theta_{A_s -> M_tj}.
std::pair<double, double> treatment_to_mediator_decomposition(
    const EffectTable& table, int t, int j);

struct FiniteOptions {
  DagLearnConfig dag;
  WithinStageOptions within;
};

struct FiniteFit {
  std::vector<DagStructure> dags;
  std::vector<SemParams> params;
  EffectTable table;
  MediationReport report;
};

FiniteFit fit_finite(const Panel& panel, const FiniteOptions& opt);
MediationReport estimate_finite(const Panel& panel, const DagLearnConfig& cfg = {});

// The same recursion for time-invariant parameters, indexed by lag: O(T^2 d)
// time and O(T d^2) memory, which makes very long horizons cheap.
MediationReport finite_eta_stationary(const SemParams& params,
                                      const WithinStage& within, int T);

}  // namespace dynmed

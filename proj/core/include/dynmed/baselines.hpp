#pragma once

#include "dynmed/dag_learn.hpp"
#include "dynmed/model.hpp"
#include "dynmed/panel.hpp"

namespace dynmed {

// Treats every stage as a separate single-stage study: the stage-s DAG is
// learned from M_s adjusted for A_s only, effects use Pa(M_sj) and A_s as
// the adjustment set, and eta at stage t averages the per-stage products
// theta_{A_s -> M_sj} theta_{M_sj -> R_s} over s <= t. Carryover is ignored,
// so delta = iime and dime = 0.
MediationReport estimate_independent_timepoints(const Panel& panel,
                                                const DagLearnConfig& cfg = {});

// Long-horizon version: one row holding the average over all stages.
MediationReport estimate_independent_timepoints_infinite(const Panel& panel,
                                                         const DagLearnConfig& cfg = {});

// The full estimator with the mediator DAG forced to be empty.
MediationReport estimate_independent_mediators(const Panel& panel);
MediationReport estimate_independent_mediators_infinite(const Panel& panel);

}  // namespace dynmed

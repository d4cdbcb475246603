#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dynmed/model.hpp"
#include "dynmed/panel.hpp"

namespace dynmed {

enum class TreatmentKind {
  bernoulli,  // A_t ~ Bernoulli(treatment_prob)
  gaussian,   // A_t ~ N(0, 1)
};

enum class NoiseKind {
  normal,   // N(0, sd^2)
  uniform,  // U(-sqrt(3) sd, sqrt(3) sd), same variance as normal
};

struct SimConfig {
  int n = 0;
  int T = 0;
  int d = 0;
  // One SemParams per stage, or a single entry reused at every stage.
  std::vector<SemParams> params;
  double treatment_prob = 0.5;
  double noise_sd_mediator = 1.0;
  double noise_sd_outcome = 1.0;
  std::uint64_t seed = 0;
  // M_0 and R_0 (every coordinate).
  double initial_value = 0.0;
  TreatmentKind treatment = TreatmentKind::bernoulli;
  NoiseKind noise = NoiseKind::normal;
  // Stages simulated before the first recorded one. Needs a single shared
  // parameter set.
  int burn_in = 0;

  const SemParams& stage_params(int t) const {
    return params.size() == 1 ? params.front() : params[t];
  }
  // Throws ValidationError on inconsistent settings.
  void validate() const;
};

// do(A_s = a) and/or do(M_sj = m) for every recorded stage s < horizon.
struct InterventionSpec {
  std::optional<double> treatment_value;
  std::optional<int> mediator_index;
  double mediator_value = 0.0;

  bool empty() const { return !treatment_value && !mediator_index; }
};

// Random parameters: Theta entries ~ U(-0.5, 0.5); W upper triangular with
// entries Bernoulli(edge_prob) x U([-0.9,-0.5] u [0.5,0.9]). W is drawn once
// and shared by all stages; with time_varying = false a single SemParams is
// returned.
std::vector<SemParams> sample_params(int d, int T, bool time_varying,
                                     std::uint64_t seed, double edge_prob = 0.9);

// The 3-mediator weight matrix used by the reference simulation design.
Eigen::MatrixXd reference_weights();

// Reference finite-horizon design: d = 3, reference W, Theta drawn per stage.
std::vector<SemParams> finite_setting(int T, std::uint64_t seed);

// Reference stationary design: d = 3, reference W, one Theta draw. Draws are
// repeated (deterministically in `seed`) until the one-step transition and
// every held-mediator transition have spectral radius <= max_radius.
SemParams stationary_setting(std::uint64_t seed, double max_radius = 0.9);

Panel simulate(const SimConfig& cfg);

// Draws from the mutilated model. Uses the same random stream as simulate, so
// an empty spec reproduces simulate exactly and any other spec changes only
// the intervened variables and their descendants.
Panel simulate_intervened(const SimConfig& cfg, const InterventionSpec& spec,
                          int horizon);

}  // namespace dynmed

#include "dynmed/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dynmed/error.hpp"
#include "dynmed/rng.hpp"

namespace dynmed {

void SimConfig::validate() const {
  if (n < 1 || T < 1 || d < 1) {
    throw ValidationError("simulation needs n, T, d >= 1");
  }
  if (!(treatment_prob >= 0.0 && treatment_prob <= 1.0)) {
    throw ValidationError("treatment_prob must lie in [0, 1]");
  }
  if (!(noise_sd_mediator > 0.0) || !(noise_sd_outcome > 0.0)) {
    throw ValidationError("noise standard deviations must be positive");
  }
  if (burn_in < 0) throw ValidationError("burn_in must be >= 0");
  if (params.size() != 1 && static_cast<int>(params.size()) != T) {
    throw ValidationError("params must have length 1 or T");
  }
  if (burn_in > 0 && params.size() != 1) {
    throw ValidationError("burn-in requires a single shared parameter set");
  }
  for (const auto& p : params) {
    p.check();
    if (p.d() != d) throw DimensionMismatch("SemParams d disagrees with config d");
  }
}

namespace {

double uniform_weight(Rng& rng) {
  std::uniform_real_distribution<double> mag(0.5, 0.9);
  std::bernoulli_distribution sign(0.5);
  const double w = mag(rng);
  return sign(rng) ? w : -w;
}

SemParams draw_theta(int d, const DagStructure& dag, Rng& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  SemParams p = SemParams::zeros(d);
  p.dag = dag;
  for (int k = 0; k < d; ++k) p.alpha1(k) = u(rng);
  for (int k = 0; k < d; ++k) p.delta1(k) = u(rng);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i) p.Gamma1(k, i) = u(rng);
  for (int k = 0; k < d; ++k) p.zeta1(k) = u(rng);
  p.alpha2 = u(rng);
  p.delta2 = u(rng);
  p.zeta2 = u(rng);
  for (int k = 0; k < d; ++k) p.gamma2(k) = u(rng);
  for (int k = 0; k < d; ++k) p.kappa(k) = u(rng);
  return p;
}

}  // namespace

std::vector<SemParams> sample_params(int d, int T, bool time_varying,
                                     std::uint64_t seed, double edge_prob) {
  if (d < 1 || T < 1) throw ValidationError("sample_params needs d, T >= 1");
  Rng rng(derive_seed(seed, 0));
  std::bernoulli_distribution edge(edge_prob);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const bool present = edge(rng);
      const double weight = uniform_weight(rng);
      if (present) w(i, j) = weight;
    }
  }
  const DagStructure dag(w);
  const int copies = time_varying ? T : 1;
  std::vector<SemParams> out;
  out.reserve(copies);
  for (int t = 0; t < copies; ++t) {
    Rng stage_rng(derive_seed(seed, 1, t));
    out.push_back(draw_theta(d, dag, stage_rng));
  }
  return out;
}

Eigen::MatrixXd reference_weights() {
  Eigen::MatrixXd w(3, 3);
  w << 0.0, -0.80, 0.61,
       0.0, 0.0, -0.82,
       0.0, 0.0, 0.0;
  return w;
}

std::vector<SemParams> finite_setting(int T, std::uint64_t seed) {
  const DagStructure dag(reference_weights());
  std::vector<SemParams> out;
  out.reserve(T);
  for (int t = 0; t < T; ++t) {
    Rng rng(derive_seed(seed, 2, t));
    out.push_back(draw_theta(3, dag, rng));
  }
  return out;
}

SemParams stationary_setting(std::uint64_t seed, double max_radius) {
  const DagStructure dag(reference_weights());
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(seed, 3, attempt));
    SemParams p = draw_theta(3, dag, rng);
    double radius = spectral_radius(p.transition());
    for (int j = 0; j < 3; ++j) radius = std::max(radius, spectral_radius(p.held_transition(j)));
    if (radius <= max_radius) return p;
  }
}

namespace {

struct StageNoise {
  double treatment_draw = 0.0;
  Eigen::VectorXd mediator;
  double outcome = 0.0;
};

class SubjectSampler {
 public:
  // Subjects draw from one stream in order; reseeding a Mersenne Twister per
  // subject cost more than the simulation itself.
  SubjectSampler(const SimConfig& cfg, Rng& rng) : cfg_(cfg), rng_(rng), noise_{} {
    noise_.mediator.resize(cfg.d);
  }

  // The number and order of draws per stage never depends on interventions.
  const StageNoise& next() {
    if (cfg_.treatment == TreatmentKind::bernoulli) {
      noise_.treatment_draw = unit_(rng_);
    } else {
      noise_.treatment_draw = normal_(rng_);
    }
    for (int j = 0; j < cfg_.d; ++j) {
      noise_.mediator(j) = cfg_.noise_sd_mediator * innovation();
    }
    noise_.outcome = cfg_.noise_sd_outcome * innovation();
    return noise_;
  }

  double treatment(const StageNoise& s) const {
    if (cfg_.treatment == TreatmentKind::bernoulli) {
      return s.treatment_draw < cfg_.treatment_prob ? 1.0 : 0.0;
    }
    return s.treatment_draw;
  }

 private:
  double innovation() {
    if (cfg_.noise == NoiseKind::normal) return normal_(rng_);
    return std::sqrt(3.0) * (2.0 * unit_(rng_) - 1.0);
  }

  const SimConfig& cfg_;
  Rng& rng_;
  StageNoise noise_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

Panel run(const SimConfig& cfg, const InterventionSpec& spec, int horizon) {
  cfg.validate();
  if (spec.mediator_index && (*spec.mediator_index < 0 || *spec.mediator_index >= cfg.d)) {
    throw ValidationError("intervened mediator index out of range");
  }
  for (const auto& p : cfg.params) {
    if (!p.dag.weights().allFinite()) {
      throw SingularStructure("mediator weight matrix is not finite");
    }
  }
  const int n = cfg.n, T = cfg.T, d = cfg.d;
  const std::size_t cells = static_cast<std::size_t>(n) * T;
  std::vector<double> a(cells), r(cells), m(cells * d);

  Eigen::VectorXd m_prev(d), mu(d), dev(d), m_cur(d);
  Rng rng(derive_seed(cfg.seed, 0));
  SubjectSampler sampler(cfg, rng);
  for (int i = 0; i < n; ++i) {
    m_prev.setConstant(cfg.initial_value);
    double r_prev = cfg.initial_value;
    for (int step = 0; step < cfg.burn_in + T; ++step) {
      const int t = step - cfg.burn_in;  // recorded stage, < 0 during burn-in
      const SemParams& p = cfg.stage_params(t < 0 ? 0 : t);
      const StageNoise& noise = sampler.next();
      const bool intervene = t >= 0 && t < horizon;

      double a_t = sampler.treatment(noise);
      if (intervene && spec.treatment_value) a_t = *spec.treatment_value;

      // noalias keeps the product from allocating a temporary every step
      mu.noalias() = p.Gamma1 * m_prev;
      mu += p.alpha1 + p.delta1 * a_t + p.zeta1 * r_prev;
      // Deviations solve dev = W^T dev + eps in topological order.
      for (int k : p.dag.order()) {
        if (intervene && spec.mediator_index && *spec.mediator_index == k) {
          dev(k) = spec.mediator_value - mu(k);
          continue;
        }
        double v = noise.mediator(k);
        for (int pa = 0; pa < d; ++pa) {
          if (p.dag.has_edge(pa, k)) v += p.dag.weights()(pa, k) * dev(pa);
        }
        dev(k) = v;
      }
      m_cur = mu + dev;
      const double r_t = p.alpha2 + p.delta2 * a_t + p.gamma2.dot(m_prev) +
                         p.zeta2 * r_prev + p.kappa.dot(m_cur) + noise.outcome;

      if (t >= 0) {
        const std::size_t c = static_cast<std::size_t>(t) * n + i;
        a[c] = a_t;
        r[c] = r_t;
        for (int j = 0; j < d; ++j) m[c * d + j] = m_cur(j);
      }
      m_prev = m_cur;
      r_prev = r_t;
    }
  }
  return Panel(n, T, d, std::move(a), std::move(m), std::move(r));
}

}  // namespace

Panel simulate(const SimConfig& cfg) { return run(cfg, InterventionSpec{}, 0); }

Panel simulate_intervened(const SimConfig& cfg, const InterventionSpec& spec,
                          int horizon) {
  return run(cfg, spec, horizon);
}

}  // namespace dynmed

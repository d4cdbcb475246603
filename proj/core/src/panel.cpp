#include "dynmed/panel.hpp"

#include <cmath>
#include <string>

#include "dynmed/error.hpp"

namespace dynmed {

Panel::Panel(int n, int T, int d, std::vector<double> treatments,
             std::vector<double> mediators, std::vector<double> outcomes)
    : n_(n),
      T_(T),
      d_(d),
      a_(std::move(treatments)),
      m_(std::move(mediators)),
      r_(std::move(outcomes)) {
  if (n < 1 || T < 1 || d < 1) {
    throw DimensionMismatch("panel needs n >= 1, T >= 1, d >= 1 (got n=" +
                            std::to_string(n) + ", T=" + std::to_string(T) +
                            ", d=" + std::to_string(d) + ")");
  }
  const std::size_t cells = static_cast<std::size_t>(n) * T;
  if (a_.size() != cells || r_.size() != cells || m_.size() != cells * d) {
    throw DimensionMismatch("panel arrays do not match (n, T, d) extents");
  }
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) {
      const std::size_t k = idx(i, t);
      if (!std::isfinite(a_[k])) throw NonFiniteValue(i, t, "treatment");
      if (!std::isfinite(r_[k])) throw NonFiniteValue(i, t, "outcome");
      for (int j = 0; j < d; ++j) {
        if (!std::isfinite(m_[k * d + j])) throw NonFiniteValue(i, t, "mediator");
      }
    }
  }
}

Eigen::Map<const Eigen::VectorXd> Panel::stage_treatments(int t) const {
  return {a_.data() + static_cast<std::size_t>(t) * n_, n_};
}

Eigen::Map<const Eigen::VectorXd> Panel::stage_outcomes(int t) const {
  return {r_.data() + static_cast<std::size_t>(t) * n_, n_};
}

Eigen::Map<const RowMatrixXd> Panel::stage_mediators(int t) const {
  return {m_.data() + static_cast<std::size_t>(t) * n_ * d_, n_, d_};
}

Panel Panel::select_subjects(std::span<const int> subjects) const {
  const int n = static_cast<int>(subjects.size());
  const std::size_t cells = static_cast<std::size_t>(n) * T_;
  std::vector<double> a(cells), r(cells), m(cells * d_);
  for (int t = 0; t < T_; ++t) {
    for (int k = 0; k < n; ++k) {
      const std::size_t src = idx(subjects[k], t);
      const std::size_t dst = static_cast<std::size_t>(t) * n + k;
      a[dst] = a_[src];
      r[dst] = r_[src];
      for (int j = 0; j < d_; ++j) m[dst * d_ + j] = m_[src * d_ + j];
    }
  }
  return Panel(n, T_, d_, std::move(a), std::move(m), std::move(r));
}

Panel Panel::permute_mediators(std::span<const int> perm) const {
  if (static_cast<int>(perm.size()) != d_) {
    throw DimensionMismatch("mediator permutation has wrong length");
  }
  std::vector<double> m(m_.size());
  const std::size_t cells = a_.size();
  for (std::size_t c = 0; c < cells; ++c) {
    for (int k = 0; k < d_; ++k) m[c * d_ + k] = m_[c * d_ + perm[k]];
  }
  return Panel(n_, T_, d_, a_, std::move(m), r_);
}

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 1.0;
};

template <typename Get>
Moments pooled_moments(std::size_t count, Get get) {
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) sum += get(k);
  const double mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double dev = get(k) - mean;
    ss += dev * dev;
  }
  const double sd =
      count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;
  return {mean, sd > 0.0 ? sd : 1.0};
}

}  // namespace

Panel Panel::standardized() const {
  const std::size_t cells = a_.size();
  std::vector<double> m(m_.size()), r(cells);
  for (int j = 0; j < d_; ++j) {
    const Moments mo =
        pooled_moments(cells, [&](std::size_t c) { return m_[c * d_ + j]; });
    for (std::size_t c = 0; c < cells; ++c) {
      m[c * d_ + j] = (m_[c * d_ + j] - mo.mean) / mo.sd;
    }
  }
  const Moments mo = pooled_moments(cells, [&](std::size_t c) { return r_[c]; });
  for (std::size_t c = 0; c < cells; ++c) r[c] = (r_[c] - mo.mean) / mo.sd;
  return Panel(n_, T_, d_, a_, std::move(m), std::move(r));
}

Panel validate_panel(const RawPanel& raw) {
  const std::size_t n = raw.treatments.size();
  if (n == 0) throw DimensionMismatch("panel has no subjects");
  if (raw.mediators.size() != n || raw.outcomes.size() != n) {
    throw DimensionMismatch("treatment, mediator and outcome arrays disagree on n");
  }
  if (raw.d < 1) throw DimensionMismatch("mediator count d must be >= 1");
  const std::size_t T = raw.treatments.front().size();
  if (T == 0) throw DimensionMismatch("panel has no stages");
  const int d = raw.d;

  std::vector<double> a(n * T), r(n * T), m(n * T * d);
  for (std::size_t i = 0; i < n; ++i) {
    if (raw.treatments[i].size() != T || raw.outcomes[i].size() != T ||
        raw.mediators[i].size() != T) {
      throw DimensionMismatch("subject " + std::to_string(i) +
                              " has a different number of stages");
    }
    for (std::size_t t = 0; t < T; ++t) {
      if (raw.mediators[i][t].size() != static_cast<std::size_t>(d)) {
        throw DimensionMismatch(
            "mediator vector of subject " + std::to_string(i) + ", stage " +
            std::to_string(t) + " has depth " +
            std::to_string(raw.mediators[i][t].size()) + " but d = " +
            std::to_string(d));
      }
      const std::size_t c = t * n + i;
      a[c] = raw.treatments[i][t];
      r[c] = raw.outcomes[i][t];
      for (int j = 0; j < d; ++j) m[c * d + j] = raw.mediators[i][t][j];
    }
  }
  return Panel(static_cast<int>(n), static_cast<int>(T), d, std::move(a),
               std::move(m), std::move(r));
}

}  // namespace dynmed

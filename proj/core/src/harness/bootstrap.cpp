#include "dynmed/harness/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "dynmed/error.hpp"
#include "dynmed/harness/parallel.hpp"
#include "dynmed/rng.hpp"

namespace dynmed {

namespace {

double quantile(std::vector<double>& v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

}  // namespace

BootstrapResult bootstrap(const Panel& panel, const Estimator& estimator, int reps,
                          std::uint64_t seed, int threads, double level) {
  if (reps < 2) throw ValidationError("bootstrap needs at least 2 replicates");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("interval level must be in (0, 1)");
  const int n = panel.n();
  std::vector<std::optional<MediationReport>> draws(reps);
  parallel_for(reps, threads, [&](int r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<int> idx(n);
    for (int& i : idx) i = pick(rng);
    try {
      draws[r] = estimator(panel.select_subjects(idx));
    } catch (const Error&) {
      draws[r].reset();
    }
  });

  std::vector<const MediationReport*> ok;
  for (const auto& d : draws)
    if (d) ok.push_back(&*d);
  BootstrapResult out;
  out.reps = reps;
  out.failures = reps - static_cast<int>(ok.size());
  if (out.failures * 10 > reps || ok.size() < 2) {
    throw BootstrapFailure(std::to_string(out.failures) + " of " + std::to_string(reps) +
                           " bootstrap replicates failed");
  }

  const auto rows = ok.front()->eta.rows(), cols = ok.front()->eta.cols();
  auto summarize = [&](auto member, Eigen::MatrixXd& se, Eigen::MatrixXd& lo,
                       Eigen::MatrixXd& hi) {
    se.resize(rows, cols);
    lo.resize(rows, cols);
    hi.resize(rows, cols);
    std::vector<double> v(ok.size());
    for (Eigen::Index a = 0; a < rows; ++a) {
      for (Eigen::Index b = 0; b < cols; ++b) {
        double mean = 0.0;
        for (std::size_t k = 0; k < ok.size(); ++k) {
          v[k] = (ok[k]->*member)(a, b);
          mean += v[k];
        }
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        se(a, b) = std::sqrt(ss / static_cast<double>(v.size() - 1));
        lo(a, b) = quantile(v, (1.0 - level) / 2.0);
        hi(a, b) = quantile(v, 1.0 - (1.0 - level) / 2.0);
      }
    }
  };
  summarize(&MediationReport::eta, out.se.eta, out.lower.eta, out.upper.eta);
  summarize(&MediationReport::iime, out.se.iime, out.lower.iime, out.upper.iime);
  summarize(&MediationReport::dime, out.se.dime, out.lower.dime, out.upper.dime);
  summarize(&MediationReport::delta, out.se.delta, out.lower.delta, out.upper.delta);
  return out;
}

}  // namespace dynmed

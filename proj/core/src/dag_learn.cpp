#include "dynmed/dag_learn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "dynmed/error.hpp"
#include "dynmed/regress.hpp"

namespace dynmed {

void DagLearnConfig::validate(int d) const {
  if (!(weight_threshold > 0.0)) throw ValidationError("weight_threshold must be > 0");
  if (!(convergence_tol > 0.0)) throw ValidationError("convergence_tol must be > 0");
  if (!(l1_penalty >= 0.0)) throw ValidationError("l1_penalty must be >= 0");
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (known_order) {
    std::vector<int> sorted = *known_order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> ident(d);
    std::iota(ident.begin(), ident.end(), 0);
    if (sorted != ident) throw ValidationError("known_order is not a permutation of 0..d-1");
  }
}

namespace {

Eigen::MatrixXd residuals_of(const StageFrame& f, std::optional<int> stage,
                             bool adjust_history = true) {
  const int d = f.d();
  try {
    const Eigen::MatrixXd x = f.columns(f.base_columns(adjust_history));
    const LeastSquares ls(x, true);
    Eigen::MatrixXd out(f.data().rows(), d);
    for (int k = 0; k < d; ++k) {
      const Eigen::VectorXd y = f.column(f.col_m(k));
      const Eigen::VectorXd b = ls.solve(y);
      out.col(k) = (y - x * b.tail(b.size() - 1)).array() - b(0);
    }
    return out;
  } catch (const RankDeficient& e) {
    if (stage) throw e.at(*stage);
    throw;
  }
}

// Z-matrix sI - W o W is a nonsingular M-matrix iff its inverse is entrywise
// nonnegative; that is the barrier's domain.
struct Barrier {
  double s;
  Eigen::MatrixXd inv;
  double value = 0.0;
  bool feasible = false;

  Barrier(const Eigen::MatrixXd& w, double s_) : s(s_) {
    const int d = static_cast<int>(w.rows());
    const Eigen::MatrixXd m =
        s * Eigen::MatrixXd::Identity(d, d) - w.cwiseProduct(w);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const double det = lu.determinant();
    if (!(det > 0.0) || !std::isfinite(det)) return;
    inv = lu.inverse();
    if (!inv.allFinite() || (inv.array() < -1e-12).any()) return;
    value = -std::log(det) + d * std::log(s);
    feasible = true;
  }
};

double soft(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

DagStructure finish(Eigen::MatrixXd w, const Eigen::MatrixXd& x, double threshold) {
  const int d = static_cast<int>(w.rows());
  w.diagonal().setZero();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (std::abs(w(i, j)) < threshold) w(i, j) = 0.0;

  // Remove the weakest edge of some cycle until none remain.
  for (;;) {
    std::vector<int> color(d, 0), parent(d, -1);
    std::vector<std::pair<int, int>> cycle;
    std::function<bool(int)> dfs = [&](int u) {
      color[u] = 1;
      for (int v = 0; v < d; ++v) {
        if (w(u, v) == 0.0) continue;
        if (color[v] == 1) {
          cycle.emplace_back(u, v);
          for (int c = u; c != v; c = parent[c]) cycle.emplace_back(parent[c], c);
          return true;
        }
        if (color[v] == 0) {
          parent[v] = u;
          if (dfs(v)) return true;
        }
      }
      color[u] = 2;
      return false;
    };
    bool found = false;
    for (int u = 0; u < d && !found; ++u)
      if (color[u] == 0) found = dfs(u);
    if (!found) break;
    auto weakest = *std::min_element(cycle.begin(), cycle.end(), [&](auto a, auto b) {
      return std::abs(w(a.first, a.second)) < std::abs(w(b.first, b.second));
    });
    w(weakest.first, weakest.second) = 0.0;
  }

  // Refit weights on the chosen support.
  Eigen::MatrixXd refit = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    std::vector<int> pa;
    for (int i = 0; i < d; ++i)
      if (w(i, k) != 0.0) pa.push_back(i);
    if (pa.empty()) continue;
    const Eigen::VectorXd b = LeastSquares(x(Eigen::all, pa), false).solve(x.col(k));
    for (std::size_t q = 0; q < pa.size(); ++q) {
      double v = b(static_cast<Eigen::Index>(q));
      if (std::abs(v) < 2 * DagStructure::kStructuralZero) {
        v = v < 0 ? -2 * DagStructure::kStructuralZero : 2 * DagStructure::kStructuralZero;
      }
      refit(pa[q], k) = v;
    }
  }
  return DagStructure(refit);
}

Eigen::MatrixXd known_order_weights(const Eigen::MatrixXd& x,
                                    const std::vector<int>& order) {
  const int d = static_cast<int>(x.cols());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
  for (int p = 1; p < d; ++p) {
    const std::vector<int> pred(order.begin(), order.begin() + p);
    const Eigen::VectorXd b =
        LeastSquares(x(Eigen::all, pred), false).solve(x.col(order[p]));
    for (int q = 0; q < p; ++q) w(pred[q], order[p]) = b(q);
  }
  return w;
}

Eigen::MatrixXd search_weights(const Eigen::MatrixXd& x, const DagLearnConfig& cfg) {
  const int d = static_cast<int>(x.cols());
  const double n = static_cast<double>(x.rows());
  const Eigen::MatrixXd sigma = x.transpose() * x / n;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);

  const double mus[] = {1.0, 0.1, 0.01, 1e-3, 1e-4};
  const double ss[] = {1.0, 0.9, 0.8, 0.7, 0.6};
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);

  auto score = [&](const Eigen::MatrixXd& v) {
    const Eigen::MatrixXd r = eye - v;
    return 0.5 * (r.transpose() * sigma * r).trace();
  };

  for (int stage = 0; stage < 5; ++stage) {
    const double mu = mus[stage], s = ss[stage];
    while (!Barrier(w, s).feasible) w *= 0.9;

    double step = 1.0;
    bool converged = false;
    Barrier cur(w, s);
    double f_cur = mu * score(w) + cur.value;
    for (int it = 0; it < cfg.max_iterations; ++it) {
      const Eigen::MatrixXd grad =
          mu * (sigma * w - sigma) + 2.0 * w.cwiseProduct(cur.inv.transpose());
      Eigen::MatrixXd next(d, d);
      double f_next = 0.0;
      std::optional<Barrier> nb;
      for (int tries = 0; tries < 60; ++tries) {
        const double thr = step * mu * cfg.l1_penalty;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            next(i, j) = i == j ? 0.0 : soft(w(i, j) - step * grad(i, j), thr);
        Barrier b(next, s);
        if (b.feasible) {
          f_next = mu * score(next) + b.value;
          const Eigen::MatrixXd diff = next - w;
          const double bound = f_cur + (grad.cwiseProduct(diff)).sum() +
                               diff.squaredNorm() / (2.0 * step);
          if (f_next <= bound + 1e-15) {
            nb.emplace(std::move(b));
            break;
          }
        }
        step *= 0.5;
      }
      if (!nb) break;  // step underflow: no further progress possible
      const double change = (next - w).cwiseAbs().maxCoeff();
      w = next;
      cur = std::move(*nb);
      f_cur = f_next;
      if (change < cfg.convergence_tol) {
        converged = true;
        break;
      }
      step = std::min(step * 1.5, 1.0);
    }
    if (!w.allFinite()) throw NonConvergence("structure search diverged");
    if (stage == 4 && !converged && logdet_acyclicity(w, 1.0) > 1e-2) {
      throw NonConvergence("structure search hit the iteration cap before reaching a DAG");
    }
  }
  return w;
}

}  // namespace

Eigen::MatrixXd residualize(const Panel& panel, int stage, bool adjust_history) {
  return residuals_of(StageFrame(panel, stage), stage, adjust_history);
}

Eigen::MatrixXd residualize_pooled(const Panel& panel, int first_stage) {
  if (panel.T() < 2) throw ValidationError("pooling needs T >= 2");
  return residuals_of(StageFrame(panel, first_stage, panel.T()), std::nullopt);
}

double logdet_acyclicity(const Eigen::MatrixXd& w, double s) {
  Barrier b(w, s);
  if (!b.feasible) return std::numeric_limits<double>::infinity();
  return b.value;
}

DagStructure learn_dag(const Eigen::MatrixXd& residuals, const DagLearnConfig& cfg) {
  const int d = static_cast<int>(residuals.cols());
  cfg.validate(d);
  if (d < 1) throw DimensionMismatch("residual matrix has no columns");
  if (residuals.rows() < d + 1) {
    throw InsufficientPoints("structure learning needs at least d + 1 rows");
  }
  if (!residuals.allFinite()) throw NonFiniteValue(-1, -1, "residual");
  if (cfg.empty || d == 1) return DagStructure(d);
  if (cfg.known_order) {
    return finish(known_order_weights(residuals, *cfg.known_order), residuals,
                  cfg.weight_threshold);
  }
  return finish(search_weights(residuals, cfg), residuals, cfg.weight_threshold);
}

}  // namespace dynmed

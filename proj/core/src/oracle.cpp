#include "dynmed/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "dynmed/effects_infinite.hpp"
#include "dynmed/error.hpp"
#include "dynmed/rng.hpp"
#include "dynmed/simulator.hpp"

namespace dynmed {

UnrolledGraph::UnrolledGraph(int T, int d) : T_(T), d_(d) {
  if (T < 1 || d < 1) throw ValidationError("unrolled graph needs T, d >= 1");
  const int n = T * (d + 2);
  nodes_.reserve(n);
  for (int s = 0; s < T; ++s) {
    nodes_.push_back({NodeKind::treatment, s, -1});
    for (int j = 0; j < d; ++j) nodes_.push_back({NodeKind::mediator, s, j});
    nodes_.push_back({NodeKind::outcome, s, -1});
  }
  in_.resize(n);
  out_.resize(n);
  topo_.resize(n);
  for (int v = 0; v < n; ++v) topo_[v] = v;
}

void UnrolledGraph::add_edge(int from, int to, double weight) {
  if (weight == 0.0) return;
  const int e = static_cast<int>(edges_.size());
  edges_.push_back({from, to, weight});
  out_[from].push_back(e);
  in_[to].push_back(e);
}

void UnrolledGraph::set_mediator_order(int s, const std::vector<int>& order) {
  for (int k = 0; k < d_; ++k) topo_[mediator(s, k)] = mediator(s, order[k]);
}

UnrolledGraph unroll(const std::vector<SemParams>& params, int T) {
  if (params.empty() || (params.size() != 1 && static_cast<int>(params.size()) != T)) {
    throw ValidationError("params must have length 1 or T");
  }
  const int d = params.front().d();
  UnrolledGraph g(T, d);
  for (int s = 0; s < T; ++s) {
    const SemParams& p = params.size() == 1 ? params.front() : params[s];
    p.check();
    if (p.d() != d) throw DimensionMismatch("stages disagree on d");
    const Eigen::MatrixXd& w = p.dag.weights();
    const Eigen::MatrixXd lift = Eigen::MatrixXd::Identity(d, d) - w.transpose();
    const Eigen::VectorXd a_m = lift * p.delta1;
    const Eigen::MatrixXd mprev_m = lift * p.Gamma1;
    const Eigen::VectorXd rprev_m = lift * p.zeta1;

    g.set_mediator_order(s, p.dag.order());
    for (int k = 0; k < d; ++k) {
      g.add_edge(g.treatment(s), g.mediator(s, k), a_m(k));
      for (int i = 0; i < d; ++i) g.add_edge(g.mediator(s, i), g.mediator(s, k), w(i, k));
      g.add_edge(g.mediator(s, k), g.outcome(s), p.kappa(k));
      if (s > 0) {
        for (int i = 0; i < d; ++i)
          g.add_edge(g.mediator(s - 1, i), g.mediator(s, k), mprev_m(k, i));
        g.add_edge(g.outcome(s - 1), g.mediator(s, k), rprev_m(k));
        g.add_edge(g.mediator(s - 1, k), g.outcome(s), p.gamma2(k));
      }
    }
    g.add_edge(g.treatment(s), g.outcome(s), p.delta2);
    if (s > 0) g.add_edge(g.outcome(s - 1), g.outcome(s), p.zeta2);
  }
  return g;
}

double path_total_effect(const UnrolledGraph& g, const std::vector<int>& sources,
                         int target, const std::vector<int>& blocked, PathMode mode) {
  const int n = g.size();
  std::vector<char> is_source(n, 0), is_blocked(n, 0);
  for (int s : sources) is_source[s] = 1;
  for (int b : blocked) is_blocked[b] = 1;
  for (int s : sources) is_blocked[s] = 0;
  is_blocked[target] = 0;

  if (mode == PathMode::dynamic_programming) {
    std::vector<double> value(n, 0.0);
    for (int v : g.topological()) {
      if (is_blocked[v]) continue;
      double acc = is_source[v] ? 1.0 : 0.0;
      for (int e : g.incoming(v)) {
        const auto& edge = g.edges()[e];
        acc += edge.weight * value[edge.from];
      }
      value[v] = acc;
      if (v == target) break;
    }
    // A source reaching itself through no edge is not a path effect.
    return value[target] - (is_source[target] ? 1.0 : 0.0);
  }

  if (n > 14) throw ValidationError("path enumeration is limited to 14 nodes");
  double total = 0.0;
  std::function<void(int, double)> walk = [&](int v, double product) {
    if (v == target) {
      total += product;
      return;
    }
    for (int e : g.outgoing(v)) {
      const auto& edge = g.edges()[e];
      if (is_blocked[edge.to]) continue;
      walk(edge.to, product * edge.weight);
    }
  };
  for (int s : sources) {
    if (s != target) walk(s, 1.0);
  }
  return total;
}

namespace {

std::vector<int> treatments_upto(const UnrolledGraph& g, int s) {
  std::vector<int> out;
  for (int i = 0; i <= s; ++i) out.push_back(g.treatment(i));
  return out;
}

std::vector<int> mediator_copies_upto(const UnrolledGraph& g, int s, int j) {
  std::vector<int> out;
  for (int u = 0; u <= s; ++u) out.push_back(g.mediator(u, j));
  return out;
}

}  // namespace

Eigen::VectorXd true_eta_finite(const std::vector<SemParams>& params, int T, int j) {
  const UnrolledGraph g = unroll(params, T);
  if (j < 0 || j >= g.d()) throw ValidationError("mediator index out of range");
  Eigen::VectorXd eta(T);
  double running = 0.0;
  for (int s = 0; s < T; ++s) {
    const std::vector<int> src = treatments_upto(g, s);
    const double total = path_total_effect(g, src, g.outcome(s));
    const double direct =
        path_total_effect(g, src, g.outcome(s), mediator_copies_upto(g, s, j));
    running += total - direct;
    eta(s) = running / (s + 1);
  }
  return eta;
}

MediationReport true_report_finite(const std::vector<SemParams>& params, int T) {
  const UnrolledGraph g = unroll(params, T);
  const int d = g.d();
  MediationReport rep = MediationReport::zeros(Horizon::finite, T, d);
  for (int j = 0; j < d; ++j) {
    rep.eta.col(j) = true_eta_finite(params, T, j);
    for (int t = 0; t < T; ++t) {
      const double prev = t > 0 ? rep.eta(t - 1, j) : 0.0;
      rep.delta(t, j) = (t + 1) * rep.eta(t, j) - t * prev;
      rep.iime(t, j) = path_total_effect(g, g.treatment(t), g.mediator(t, j)) *
                       path_total_effect(g, g.mediator(t, j), g.outcome(t));
      rep.dime(t, j) = rep.delta(t, j) - rep.iime(t, j);
    }
  }
  return rep;
}

Eigen::VectorXd true_eta_infinite(const SemParams& params) {
  return infinite_report(params, analytic_within_stage(params)).eta.row(0).transpose();
}

McEstimate mc_eta_all(const std::vector<SemParams>& params, int T,
                      const McOptions& opt) {
  if (opt.rollouts < 2) throw ValidationError("Monte Carlo needs at least 2 rollouts");
  if (opt.batch < 1) throw ValidationError("batch must be >= 1");
  const int d = params.front().d();
  // arm 0: do(A=1), arm 1: do(A=0), arms 2+2j / 3+2j: the same with M_j fixed.
  const int arms = 2 + 2 * d;

  SimConfig cfg;
  cfg.T = T;
  cfg.d = d;
  cfg.params = params;
  cfg.burn_in = opt.burn_in;

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(T, d), sumsq = Eigen::MatrixXd::Zero(T, d);
  // Keep a batch's panels to a few million doubles whatever the horizon.
  const long batch = std::max<long>(
      1, std::min<long>(opt.batch, 4'000'000L / (static_cast<long>(T) * (d + 2))));
  const long batches = (opt.rollouts + batch - 1) / batch;
  std::vector<Eigen::MatrixXd> outcome(arms);  // T x rows, per arm
  for (long b = 0; b < batches; ++b) {
    const int rows = static_cast<int>(std::min<long>(batch, opt.rollouts - b * batch));
    cfg.n = rows;
    for (int k = 0; k < arms; ++k) {
      InterventionSpec spec;
      spec.treatment_value = (k % 2 == 0) ? 1.0 : 0.0;
      if (k >= 2) {
        spec.mediator_index = (k - 2) / 2;
        spec.mediator_value = opt.mediator_value;
      }
      cfg.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(k),
                             static_cast<std::uint64_t>(b));
      const Panel p = simulate_intervened(cfg, spec, T);
      outcome[k].resize(T, rows);
      for (int t = 0; t < T; ++t) outcome[k].row(t) = p.stage_outcomes(t).transpose();
    }
    for (int j = 0; j < d; ++j) {
      // Per rollout: running mean over stages of the path contrast.
      const Eigen::MatrixXd through = (outcome[0] - outcome[1]) -
                                      (outcome[2 + 2 * j] - outcome[3 + 2 * j]);
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(rows);
      for (int t = 0; t < T; ++t) {
        acc += through.row(t);
        const Eigen::RowVectorXd avg = acc / (t + 1);
        sum(t, j) += avg.sum();
        sumsq(t, j) += avg.squaredNorm();
      }
    }
  }
  const double n = static_cast<double>(opt.rollouts);
  McEstimate out;
  out.estimate = sum / n;
  const Eigen::MatrixXd var =
      ((sumsq / n - out.estimate.cwiseAbs2()) * (n / (n - 1.0))).cwiseMax(0.0);
  out.mc_se = (var / n).cwiseSqrt();
  return out;
}

McEstimate mc_eta(const std::vector<SemParams>& params, int T, int j,
                  const McOptions& opt) {
  McEstimate all = mc_eta_all(params, T, opt);
  McEstimate out;
  out.estimate = all.estimate.col(j);
  out.mc_se = all.mc_se.col(j);
  return out;
}

}  // namespace dynmed

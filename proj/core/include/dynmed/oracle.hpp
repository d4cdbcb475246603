#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dynmed/model.hpp"

namespace dynmed {

enum class NodeKind { treatment, mediator, outcome };

struct UnrolledNode {
  NodeKind kind;
  int stage;
  int mediator;  // -1 unless kind == mediator
};

struct UnrolledEdge {
  int from;
  int to;
  double weight;
};

// The linear SEM unrolled over T stages, with every variable as a node and
// every nonzero direct effect as an edge. Mediator equations are written in
// structural form: the coefficient of a treatment or lagged variable on M_sk
// is the k-th entry of (I - W^T) times the corresponding mean coefficient,
// and M_si -> M_sk carries W(i, k).
class UnrolledGraph {
 public:
  UnrolledGraph(int T, int d);

  int T() const noexcept { return T_; }
  int d() const noexcept { return d_; }
  int size() const noexcept { return static_cast<int>(nodes_.size()); }

  int treatment(int s) const { return s * (d_ + 2); }
  int mediator(int s, int j) const { return s * (d_ + 2) + 1 + j; }
  int outcome(int s) const { return s * (d_ + 2) + d_ + 1; }

  const std::vector<UnrolledNode>& nodes() const noexcept { return nodes_; }
  const std::vector<UnrolledEdge>& edges() const noexcept { return edges_; }
  const std::vector<int>& incoming(int v) const { return in_[v]; }
  const std::vector<int>& outgoing(int v) const { return out_[v]; }
  const std::vector<int>& topological() const noexcept { return topo_; }

  // Zero weights are ignored.
  void add_edge(int from, int to, double weight);
  void set_mediator_order(int s, const std::vector<int>& order);

 private:
  int T_;
  int d_;
  std::vector<UnrolledNode> nodes_;
  std::vector<UnrolledEdge> edges_;
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> out_;
  std::vector<int> topo_;
};

// `params` has length T or 1 (reused at every stage).
UnrolledGraph unroll(const std::vector<SemParams>& params, int T);

enum class PathMode {
  dynamic_programming,
  // Walks every path explicitly; only for graphs of at most 14 nodes.
  enumerate,
};

// Sum over directed paths from any source to target that avoid `blocked`
// (sources and target themselves are never treated as blocked) of the
// product of edge weights. With several sources this is the sum of their
// individual total effects.
double path_total_effect(const UnrolledGraph& g, const std::vector<int>& sources,
                         int target, const std::vector<int>& blocked = {},
                         PathMode mode = PathMode::dynamic_programming);

inline double path_total_effect(const UnrolledGraph& g, int source, int target,
                                const std::vector<int>& blocked = {},
                                PathMode mode = PathMode::dynamic_programming) {
  return path_total_effect(g, std::vector<int>{source}, target, blocked, mode);
}

// eta_j at every stage from the path sums of the unrolled graph.
Eigen::VectorXd true_eta_finite(const std::vector<SemParams>& params, int T, int j);

// Full finite-horizon report (eta, delta, iime, dime) from the path sums.
MediationReport true_report_finite(const std::vector<SemParams>& params, int T);

// Long-run effect of a time-invariant model, from its analytic within-stage
// effects.
Eigen::VectorXd true_eta_infinite(const SemParams& params);

struct McEstimate {
  Eigen::MatrixXd estimate;  // T x d (or T x 1 for a single mediator)
  Eigen::MatrixXd mc_se;
};

struct McOptions {
  long rollouts = 1'000'000;
  std::uint64_t seed = 0;
  double mediator_value = 0.0;
  int burn_in = 0;
  int batch = 50'000;
};

// Interventional Monte Carlo: each arm (do(A = 1), do(A = 0) and, per
// mediator, the same with M_j held at mediator_value) uses its own noise
// stream, and the standard error comes from the per-rollout contrasts.
McEstimate mc_eta_all(const std::vector<SemParams>& params, int T,
                      const McOptions& opt);
McEstimate mc_eta(const std::vector<SemParams>& params, int T, int j,
                  const McOptions& opt);

}  // namespace dynmed

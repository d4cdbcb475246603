#pragma once

#include <vector>

#include <Eigen/Dense>

namespace dynmed {

using AdjacencyMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Kahn's algorithm; ties are broken by the smallest index, so an edgeless
// graph yields the identity order. Throws CyclicGraph.
std::vector<int> topological_order(const AdjacencyMatrix& adjacency);

// Weighted within-stage mediator DAG. Entry (i, j) is the weight of the edge
// M_i -> M_j, i.e. M_i is a parent of M_j.
class DagStructure {
 public:
  // Learned weights below this magnitude are structural zeros.
  static constexpr double kStructuralZero = 1e-8;

  // Edgeless graph on d mediators.
  explicit DagStructure(int d = 0);

  // Throws CyclicGraph if the support is cyclic and DimensionMismatch if the
  // matrix is not square or has a nonzero diagonal.
  explicit DagStructure(Eigen::MatrixXd weights,
                        double zero_tol = kStructuralZero);

  int d() const noexcept { return static_cast<int>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const noexcept { return weights_; }
  const AdjacencyMatrix& adjacency() const noexcept { return adjacency_; }
  bool has_edge(int from, int to) const { return adjacency_(from, to); }
  int edge_count() const { return static_cast<int>(adjacency_.count()); }

  const std::vector<int>& order() const noexcept { return order_; }
  std::vector<int> parents(int j) const;
  // All nodes reachable from j through at least one edge.
  std::vector<int> descendants(int j) const;

  // Same support, new weights (entries off the support must be zero).
  DagStructure with_weights(const Eigen::MatrixXd& weights) const;

  bool same_support(const DagStructure& other) const {
    return adjacency_ == other.adjacency_;
  }

 private:
  Eigen::MatrixXd weights_;
  AdjacencyMatrix adjacency_;
  std::vector<int> order_;
};

std::vector<int> topological_order(const DagStructure& dag);

}  // namespace dynmed

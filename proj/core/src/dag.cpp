#include "dynmed/dag.hpp"

#include <cmath>
#include <queue>
#include <string>

#include "dynmed/error.hpp"

namespace dynmed {

std::vector<int> topological_order(const AdjacencyMatrix& adjacency) {
  const int d = static_cast<int>(adjacency.rows());
  if (adjacency.cols() != d) throw DimensionMismatch("adjacency must be square");
  std::vector<int> indegree(d, 0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (adjacency(i, j)) ++indegree[j];

  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int j = 0; j < d; ++j)
    if (indegree[j] == 0) ready.push(j);

  std::vector<int> order;
  order.reserve(d);
  while (!ready.empty()) {
    const int i = ready.top();
    ready.pop();
    order.push_back(i);
    for (int j = 0; j < d; ++j) {
      if (adjacency(i, j) && --indegree[j] == 0) ready.push(j);
    }
  }
  if (static_cast<int>(order.size()) != d) {
    throw CyclicGraph("mediator graph contains a directed cycle");
  }
  return order;
}

std::vector<int> topological_order(const DagStructure& dag) { return dag.order(); }

DagStructure::DagStructure(int d)
    : weights_(Eigen::MatrixXd::Zero(d, d)),
      adjacency_(AdjacencyMatrix::Constant(d, d, false)) {
  order_.resize(d);
  for (int i = 0; i < d; ++i) order_[i] = i;
}

DagStructure::DagStructure(Eigen::MatrixXd weights, double zero_tol)
    : weights_(std::move(weights)) {
  const int d = static_cast<int>(weights_.rows());
  if (weights_.cols() != d) throw DimensionMismatch("weight matrix must be square");
  adjacency_ = AdjacencyMatrix::Constant(d, d, false);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (!std::isfinite(weights_(i, j))) {
        throw DimensionMismatch("non-finite DAG weight");
      }
      if (std::abs(weights_(i, j)) < zero_tol) {
        weights_(i, j) = 0.0;
      } else if (i == j) {
        throw DimensionMismatch("DAG weight matrix has a nonzero diagonal");
      } else {
        adjacency_(i, j) = true;
      }
    }
  }
  order_ = topological_order(adjacency_);
}

std::vector<int> DagStructure::parents(int j) const {
  std::vector<int> out;
  for (int i = 0; i < d(); ++i)
    if (adjacency_(i, j)) out.push_back(i);
  return out;
}

std::vector<int> DagStructure::descendants(int j) const {
  std::vector<char> seen(d(), 0);
  std::vector<int> stack{j};
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < d(); ++v) {
      if (adjacency_(u, v) && !seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  std::vector<int> out;
  for (int v = 0; v < d(); ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

DagStructure DagStructure::with_weights(const Eigen::MatrixXd& weights) const {
  if (weights.rows() != d() || weights.cols() != d()) {
    throw DimensionMismatch("weight matrix has wrong extents");
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d(), d());
  for (int i = 0; i < d(); ++i)
    for (int j = 0; j < d(); ++j)
      if (adjacency_(i, j)) w(i, j) = weights(i, j);
  return DagStructure(std::move(w));
}

}  // namespace dynmed

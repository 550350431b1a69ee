#include "mdbd/graph.hpp"

#include <stdexcept>
#include <vector>

namespace mdbd {

Graph::Graph(int n, Eigen::MatrixXd w) : n_agents(n), weights(std::move(w)) {
  if (n <= 0) throw std::invalid_argument("Graph: n_agents must be positive");
  if (weights.rows() != n || weights.cols() != n)
    throw std::invalid_argument("Graph: weight matrix must be n x n");
  for (int i = 0; i < n; ++i) {
    if (weights(i, i) != 0.0)
      throw std::invalid_argument("Graph: diagonal weights must be zero");
    for (int j = i + 1; j < n; ++j) {
      if (weights(i, j) < 0.0 || weights(i, j) != weights(j, i))
        throw std::invalid_argument("Graph: weights must be symmetric nonnegative");
    }
  }
}

Graph Graph::cycle(int n, double weight) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  if (n == 2) {
    w(0, 1) = w(1, 0) = weight;
  } else if (n > 2) {
    for (int i = 0; i < n; ++i) {
      int j = (i + 1) % n;
      w(i, j) = w(j, i) = weight;
    }
  }
  return Graph(n, std::move(w));
}

Graph Graph::single_edge(int n, int i, int j, double weight) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  w(i, j) = w(j, i) = weight;
  return Graph(n, std::move(w));
}

Eigen::MatrixXd laplacian(const Graph& g) {
  Eigen::MatrixXd l = -g.weights;
  l.diagonal() = g.weights.rowwise().sum();
  return l;
}

Eigen::MatrixXd laplacian_apply(const Graph& g, const Eigen::MatrixXd& v) {
  if (v.cols() != g.n_agents)
    throw std::invalid_argument("laplacian_apply: expected one column per agent");
  // col i of v * L equals sum_j a_ij (v_i - v_j); L is symmetric.
  return v * laplacian(g);
}

bool is_connected(const Graph& g) {
  const int n = g.n_agents;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      if (!seen[j] && g.weights(i, j) > 0.0) {
        seen[j] = 1;
        ++reached;
        stack.push_back(j);
      }
    }
  }
  return reached == n;
}

}  // namespace mdbd

#pragma once

#include <Eigen/Dense>

namespace mdbd {

/// Undirected weighted communication topology. Weights are stored dense;
/// a_ij = a_ji >= 0, zero diagonal.
struct Graph {
  int n_agents = 0;
  Eigen::MatrixXd weights;  // n_agents x n_agents

  Graph() = default;
  Graph(int n, Eigen::MatrixXd w);

  /// Cycle graph 1 - 2 - ... - n - 1 with the given uniform edge weight.
  static Graph cycle(int n, double weight = 1.0);
  /// Single edge between nodes i and j on n nodes.
  static Graph single_edge(int n, int i, int j, double weight = 1.0);
};

/// L = D - A with D_ii = sum_j a_ij. Symmetric positive semidefinite.
Eigen::MatrixXd laplacian(const Graph& g);

/// Applies the consensus operator blockwise: column i of the result is
/// sum_j a_ij (v_i - v_j), where v_i is column i of v. Equivalent to
/// (L_N (x) I_d) v without materializing the Kronecker product.
Eigen::MatrixXd laplacian_apply(const Graph& g, const Eigen::MatrixXd& v);

/// Breadth-first sweep over positive-weight edges.
bool is_connected(const Graph& g);

}  // namespace mdbd

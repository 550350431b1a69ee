#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mdbd/graph.hpp"
#include "mdbd/mirror.hpp"

namespace mdbd {

/// f(x) = ||W x - d||^2 + l1_coef ||x||_1. Covers the benchmark cost family
/// and, with W = I, d = target, l1_coef = 0, plain quadratic tracking costs.
struct QuadL1Cost {
  Eigen::MatrixXd w;
  Eigen::VectorXd d;
  double l1_coef = 0.0;
};

/// One coupled-inequality row g(x) = ||x||^2 + l1_coef ||x||_1 - offset.
struct SphereL1Row {
  double l1_coef = 0.0;
  double offset = 0.0;
};

struct LocalProblem {
  QuadL1Cost cost;
  std::vector<SphereL1Row> ineq;  // p rows
  Eigen::MatrixXd eq_matrix;      // q x n
  Eigen::VectorXd eq_offset;      // q
  ConstraintSet set;
  GeneratingFunction generator;
};

struct SlaterCertificate {
  Eigen::MatrixXd point;  // n x N, strictly feasible stacked point
  double slack = 0.0;     // min margin of the coupled inequality
  double eq_residual = 0.0;
};

struct NetworkProblem {
  std::vector<LocalProblem> agents;
  Graph graph;
  // Recorded generation parameters (for serialization / reproducibility).
  std::string family = "custom";
  std::uint64_t seed = 0;

  int n_agents() const { return static_cast<int>(agents.size()); }
  int dim_n() const { return agents.empty() ? 0 : static_cast<int>(agents[0].cost.w.cols()); }
  int dim_p() const { return agents.empty() ? 0 : static_cast<int>(agents[0].ineq.size()); }
  int dim_q() const { return agents.empty() ? 0 : static_cast<int>(agents[0].eq_matrix.rows()); }

  /// Connectivity and cross-agent dimension consistency. Throws on violation.
  void validate() const;
};

double eval_cost(const LocalProblem& p, const Eigen::VectorXd& x);
/// Minimal-norm subgradient selection: the l1 component at 0 is chosen 0.
Eigen::VectorXd subgrad_cost(const LocalProblem& p, const Eigen::VectorXd& x);

Eigen::VectorXd eval_ineq(const LocalProblem& p, const Eigen::VectorXd& x);
/// p x n matrix, one subgradient row per constraint component.
Eigen::MatrixXd subgrad_ineq(const LocalProblem& p, const Eigen::VectorXd& x);

/// sum_i A_i x_i - sum_i b_i for a stacked point (one agent per column).
Eigen::VectorXd equality_residual(const NetworkProblem& net, const Eigen::MatrixXd& x);

/// Aggregate inequality sum_i g_i(x_i).
Eigen::VectorXd inequality_sum(const NetworkProblem& net, const Eigen::MatrixXd& x);

struct InstanceOptions {
  int q = 2;             // equality rows
  double l1_coef = 0.1;  // c_i in the cost and coupled inequality
};

struct GeneratedInstance {
  NetworkProblem net;
  SlaterCertificate slater;
};

/// Seeded simplex-constrained benchmark family on a cycle graph: random PSD
/// W_i = G'G, random d_i, per-agent inequality offset 25/(2n + i^2), and
/// A_i, b_i built so the uniform simplex point satisfies the equality
/// exactly and the summed inequality strictly.
GeneratedInstance generate_instance(std::uint64_t seed, int n_agents, int n,
                                    InstanceOptions opts = {});

/// Two-agent scalar regression instance with a hand-solvable KKT system:
/// f_i = (x_i - c_i)^2 on [0,1], no inequality, equality x_1 + x_2 = 1.
GeneratedInstance regression_instance(double c1 = 0.3, double c2 = 0.5);

}  // namespace mdbd

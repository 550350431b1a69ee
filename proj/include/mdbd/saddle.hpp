#pragma once

#include <string>

#include "mdbd/state.hpp"

namespace mdbd {

/// Reference primal-dual point with one mirror-space preimage s* taken from
/// -F(z*) + grad Phi(z*).
struct SaddlePoint {
  OutputState z_star;
  StackedState s_star;
  double optimal_value = 0.0;
  // Oracle provenance.
  std::string method;
  double tolerance = 0.0;
  double achieved_residual = 0.0;
  std::uint64_t seed = 0;
};

/// Blocks of the monotone operator F(z).
struct OperatorBlocks {
  Eigen::MatrixXd x;       // df_i + dg_i' lambda_i + A_i' mu_i
  Eigen::MatrixXd lambda;  // -g_i + (L omega)_i
  Eigen::MatrixXd mu;      // -A_i x_i + b_i + (L nu)_i
  Eigen::MatrixXd omega;   // -(L lambda)_i
  Eigen::MatrixXd nu;      // -(L mu)_i
};

double lagrangian(const NetworkProblem& net, const OutputState& z);

/// One selection of F(z) with minimal-norm subgradients.
OperatorBlocks F_eval(const NetworkProblem& net, const OutputState& z);

/// Projected-gradient (natural map) residual of the saddle condition
/// -F(z) in N_Theta(z): mirror natural map on the x blocks, positive-part
/// natural map on lambda, raw operator norm on the free blocks. Zero iff z
/// is a saddle point. Requires z feasible in Theta.
double kkt_residual(const NetworkProblem& net, const OutputState& z);

/// s = -F(z) + grad Phi(z); the canonical mirror preimage of a saddle z.
StackedState mirror_preimage(const NetworkProblem& net, const OutputState& z);

}  // namespace mdbd

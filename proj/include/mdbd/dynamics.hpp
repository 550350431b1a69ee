#pragma once

#include "mdbd/state.hpp"

namespace mdbd {

struct FieldEvaluation {
  StackedState ds;
  // Subgradient elements selected at this state (cost block), recorded so a
  // run is reproducible from its trace.
  Eigen::MatrixXd selected_cost_subgradients;  // n x N
};

/// z = Pi_Theta^Phi(s): x_i through the mirror map, lambda_i = [gamma_i]^+,
/// (mu, omega, nu) passed through.
OutputState output_map(const NetworkProblem& net, const StackedState& s,
                       ProjectionMode mode = ProjectionMode::Fast);

/// The mirror-descent flows with Bregman damping:
///   dy_i     = -df_i(x_i) - dg_i(x_i)' lambda_i - A_i' mu_i + grad phi_i(x_i) - y_i
///   dgamma_i = g_i(x_i) - sum_j a_ij (omega_i - omega_j) + lambda_i - gamma_i
///   dmu_i    = A_i x_i - b_i - sum_j a_ij (nu_i - nu_j)
///   domega_i = sum_j a_ij (lambda_i - lambda_j)
///   dnu_i    = sum_j a_ij (mu_i - mu_j)
FieldEvaluation mdbd_field(const NetworkProblem& net, const StackedState& s,
                           ProjectionMode mode = ProjectionMode::Fast);

/// Euclidean projection-based baseline: the same flows with every generating
/// function replaced by the quadratic on the same local set, so the output
/// map is a plain projection. `mode` selects the fast or generic-QP
/// projection path on simplex sets.
FieldEvaluation projection_baseline_field(const NetworkProblem& net,
                                          const StackedState& s,
                                          ProjectionMode mode = ProjectionMode::Fast);

/// Copy of `net` with every generator replaced by the quadratic on Omega_i.
NetworkProblem with_quadratic_generators(const NetworkProblem& net);

}  // namespace mdbd

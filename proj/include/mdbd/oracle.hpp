#pragma once

#include "mdbd/saddle.hpp"

namespace mdbd {

struct OracleOptions {
  // Diminishing-step phase a/(k+b).
  double step_a = 1.0;
  double step_b = 10.0;
  int subgradient_iters = 20000;
  // Augmented-Lagrangian polish.
  int outer_iters = 60;
  int inner_iters = 5000;
  double rho0 = 10.0;
  // Moderate penalty cap keeps the inner solves well conditioned; the final
  // accuracy comes from the active-set Newton refinement, not from rho.
  double rho_max = 1e4;
  bool polish = true;  // active-set Newton refinement after the AL phase
  std::uint64_t seed = 0;
};

/// Centralized reference solver: projected primal-dual subgradient with
/// diminishing steps, polished by an augmented-Lagrangian phase with
/// accelerated projected-gradient inner solves. Independent of the
/// distributed flows; shares only the problem oracles. Throws if the
/// requested residual is not reached.
SaddlePoint solve_reference(const NetworkProblem& net, double tol,
                            OracleOptions opts = {});

/// Exhaustive feasible-mesh minimizer; total free primal dimension <= 3.
/// Throws NO_FEASIBLE_NODE if no mesh node satisfies the coupled
/// constraints at the given tolerances.
Eigen::MatrixXd mesh_search(const NetworkProblem& net, double resolution,
                            double ineq_tol = 1e-12, double eq_tol = 1e-6);

}  // namespace mdbd

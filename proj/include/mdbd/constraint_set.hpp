#pragma once

#include <Eigen/Dense>

namespace mdbd {

enum class SetKind { UnitSimplex, Box, Ball, NonnegativeOrthant };

/// How Euclidean projections onto the unit simplex are computed.
/// Fast is the O(n log n) sort-and-threshold method; GenericQp solves the
/// projection as a general quadratic program by an iterative method and is
/// kept solely for timing comparisons against the fast path.
enum class ProjectionMode { Fast, GenericQp };

/// Nonempty closed convex set, one of a small closed catalogue.
struct ConstraintSet {
  SetKind kind = SetKind::UnitSimplex;
  int dim = 0;
  Eigen::VectorXd lower, upper;  // Box
  Eigen::VectorXd center;        // Ball
  double radius = 0.0;           // Ball

  static ConstraintSet unit_simplex(int n);
  static ConstraintSet box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  static ConstraintSet ball(Eigen::VectorXd center, double radius);
  static ConstraintSet nonnegative_orthant(int n);

  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
};

bool operator==(const ConstraintSet& a, const ConstraintSet& b);

/// argmin_{x in set} ||x - z||.
Eigen::VectorXd euclidean_project(const ConstraintSet& set, const Eigen::VectorXd& z,
                                  ProjectionMode mode = ProjectionMode::Fast);

/// Sort-and-threshold projection onto {x >= 0, sum x = 1}.
Eigen::VectorXd project_simplex_fast(const Eigen::VectorXd& z);

/// Same projection computed as a general QP min 1/2 x'Qx + c'x s.t. 1'x = 1,
/// x >= 0 with Q stored dense, solved by ADMM with a dense KKT factorization.
Eigen::VectorXd project_simplex_generic_qp(const Eigen::VectorXd& z,
                                           double tol = 1e-10, int max_iters = 2000);

}  // namespace mdbd

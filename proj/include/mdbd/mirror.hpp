#pragma once

#include <Eigen/Dense>

#include "mdbd/constraint_set.hpp"

namespace mdbd {

enum class GeneratorKind {
  Entropy,   // sum_k x_k log x_k, simplex domain only
  Quadratic  // 1/2 ||x||^2, any closed convex domain
};

/// Generating function of the Bregman geometry: value, gradient (the
/// damping term of the flows) and the induced mirror map onto its domain.
struct GeneratingFunction {
  GeneratorKind kind = GeneratorKind::Quadratic;
  ConstraintSet domain;

  static GeneratingFunction entropy_on_simplex(int n);
  static GeneratingFunction quadratic(ConstraintSet domain);
};

/// phi(x). Entropy uses the 0 log 0 = 0 convention.
double generator_value(const GeneratingFunction& f, const Eigen::VectorXd& x);

/// grad phi(x): componentwise 1 + log x_k for entropy (components floored at
/// 1e-300 before the log), x itself for the quadratic.
Eigen::VectorXd damping(const GeneratingFunction& f, const Eigen::VectorXd& x);

/// Mirror map argmin_{x in domain} { -x'z + phi(x) }: softmax with
/// max-subtraction for the entropy case, the Euclidean projection for the
/// quadratic case.
Eigen::VectorXd mirror_map(const GeneratingFunction& f, const Eigen::VectorXd& z,
                           ProjectionMode mode = ProjectionMode::Fast);

/// D_phi(x, y) = phi(x) - phi(y) - grad phi(y)'(x - y) >= 0. Both points
/// must lie in the domain.
double bregman_divergence(const GeneratingFunction& f, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y);

Eigen::VectorXd softmax(const Eigen::VectorXd& z);

}  // namespace mdbd

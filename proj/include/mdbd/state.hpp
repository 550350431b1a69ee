#pragma once

#include <Eigen/Dense>

#include "mdbd/problem.hpp"

namespace mdbd {

/// Mirror-space state s = (y, gamma, mu, omega, nu), one agent per column.
struct StackedState {
  Eigen::MatrixXd y;      // n x N
  Eigen::MatrixXd gamma;  // p x N
  Eigen::MatrixXd mu;     // q x N
  Eigen::MatrixXd omega;  // p x N
  Eigen::MatrixXd nu;     // q x N

  static StackedState zero(const NetworkProblem& net);

  bool all_finite() const;
  double norm() const;
  double squared_norm() const;

  StackedState& operator+=(const StackedState& o);
  StackedState& operator*=(double a);
};

StackedState operator+(StackedState a, const StackedState& b);
StackedState operator-(const StackedState& a, const StackedState& b);
StackedState operator*(double a, StackedState s);

/// Output z = (x, lambda, mu, omega, nu); x_i in Omega_i, lambda >= 0.
struct OutputState {
  Eigen::MatrixXd x;       // n x N
  Eigen::MatrixXd lambda;  // p x N
  Eigen::MatrixXd mu;      // q x N
  Eigen::MatrixXd omega;   // p x N
  Eigen::MatrixXd nu;      // q x N

  double norm() const;
};

OutputState operator-(const OutputState& a, const OutputState& b);

}  // namespace mdbd

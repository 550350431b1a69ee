#include "mdbd/state.hpp"

#include <cmath>

namespace mdbd {

StackedState StackedState::zero(const NetworkProblem& net) {
  const int nn = net.n_agents();
  StackedState s;
  s.y = Eigen::MatrixXd::Zero(net.dim_n(), nn);
  s.gamma = Eigen::MatrixXd::Zero(net.dim_p(), nn);
  s.mu = Eigen::MatrixXd::Zero(net.dim_q(), nn);
  s.omega = Eigen::MatrixXd::Zero(net.dim_p(), nn);
  s.nu = Eigen::MatrixXd::Zero(net.dim_q(), nn);
  return s;
}

bool StackedState::all_finite() const {
  return y.allFinite() && gamma.allFinite() && mu.allFinite() &&
         omega.allFinite() && nu.allFinite();
}

double StackedState::squared_norm() const {
  return y.squaredNorm() + gamma.squaredNorm() + mu.squaredNorm() +
         omega.squaredNorm() + nu.squaredNorm();
}

double StackedState::norm() const { return std::sqrt(squared_norm()); }

StackedState& StackedState::operator+=(const StackedState& o) {
  y += o.y;
  gamma += o.gamma;
  mu += o.mu;
  omega += o.omega;
  nu += o.nu;
  return *this;
}

StackedState& StackedState::operator*=(double a) {
  y *= a;
  gamma *= a;
  mu *= a;
  omega *= a;
  nu *= a;
  return *this;
}

StackedState operator+(StackedState a, const StackedState& b) { return a += b; }

StackedState operator-(const StackedState& a, const StackedState& b) {
  StackedState r = a;
  r.y -= b.y;
  r.gamma -= b.gamma;
  r.mu -= b.mu;
  r.omega -= b.omega;
  r.nu -= b.nu;
  return r;
}

StackedState operator*(double a, StackedState s) { return s *= a; }

double OutputState::norm() const {
  return std::sqrt(x.squaredNorm() + lambda.squaredNorm() + mu.squaredNorm() +
                   omega.squaredNorm() + nu.squaredNorm());
}

OutputState operator-(const OutputState& a, const OutputState& b) {
  OutputState r = a;
  r.x -= b.x;
  r.lambda -= b.lambda;
  r.mu -= b.mu;
  r.omega -= b.omega;
  r.nu -= b.nu;
  return r;
}

}  // namespace mdbd

#include "mdbd/saddle.hpp"

#include <cmath>
#include <stdexcept>

namespace mdbd {

double lagrangian(const NetworkProblem& net, const OutputState& z) {
  const int nn = net.n_agents();
  const Eigen::MatrixXd l_omega = laplacian_apply(net.graph, z.omega);
  const Eigen::MatrixXd l_nu = laplacian_apply(net.graph, z.nu);
  double v = 0.0;
  for (int i = 0; i < nn; ++i) {
    const auto& a = net.agents[i];
    const Eigen::VectorXd xi = z.x.col(i);
    v += eval_cost(a, xi);
    v += z.lambda.col(i).dot(eval_ineq(a, xi) - l_omega.col(i));
    v += z.mu.col(i).dot(a.eq_matrix * xi - a.eq_offset - l_nu.col(i));
  }
  return v;
}

OperatorBlocks F_eval(const NetworkProblem& net, const OutputState& z) {
  const int nn = net.n_agents();
  OperatorBlocks f;
  f.x.resize(net.dim_n(), nn);
  f.lambda.resize(net.dim_p(), nn);
  f.mu.resize(net.dim_q(), nn);
  f.omega = -laplacian_apply(net.graph, z.lambda);
  f.nu = -laplacian_apply(net.graph, z.mu);
  const Eigen::MatrixXd l_omega = laplacian_apply(net.graph, z.omega);
  const Eigen::MatrixXd l_nu = laplacian_apply(net.graph, z.nu);
  for (int i = 0; i < nn; ++i) {
    const auto& a = net.agents[i];
    const Eigen::VectorXd xi = z.x.col(i);
    f.x.col(i) = subgrad_cost(a, xi) +
                 subgrad_ineq(a, xi).transpose() * z.lambda.col(i) +
                 a.eq_matrix.transpose() * z.mu.col(i);
    f.lambda.col(i) = -eval_ineq(a, xi) + l_omega.col(i);
    f.mu.col(i) = -(a.eq_matrix * xi) + a.eq_offset + l_nu.col(i);
  }
  return f;
}

double kkt_residual(const NetworkProblem& net, const OutputState& z) {
  const int nn = net.n_agents();
  for (int i = 0; i < nn; ++i) {
    if (!net.agents[i].set.contains(z.x.col(i), 1e-8))
      throw std::invalid_argument("kkt_residual: x outside local set");
  }
  if (net.dim_p() > 0 && z.lambda.minCoeff() < -1e-12)
    throw std::invalid_argument("kkt_residual: negative multiplier");

  const OperatorBlocks f = F_eval(net, z);
  double sq = 0.0;
  for (int i = 0; i < nn; ++i) {
    const auto& gen = net.agents[i].generator;
    const Eigen::VectorXd xi = z.x.col(i);
    const Eigen::VectorXd mapped =
        mirror_map(gen, damping(gen, xi) - f.x.col(i));
    sq += (xi - mapped).squaredNorm();
  }
  sq += (z.lambda - (z.lambda - f.lambda).cwiseMax(0.0)).squaredNorm();
  sq += f.mu.squaredNorm() + f.omega.squaredNorm() + f.nu.squaredNorm();
  return std::sqrt(sq);
}

StackedState mirror_preimage(const NetworkProblem& net, const OutputState& z) {
  const OperatorBlocks f = F_eval(net, z);
  StackedState s;
  s.y.resize(net.dim_n(), net.n_agents());
  for (int i = 0; i < net.n_agents(); ++i)
    s.y.col(i) = -f.x.col(i) + damping(net.agents[i].generator, z.x.col(i));
  s.gamma = -f.lambda + z.lambda;
  s.mu = -f.mu + z.mu;
  s.omega = -f.omega + z.omega;
  s.nu = -f.nu + z.nu;
  return s;
}

}  // namespace mdbd

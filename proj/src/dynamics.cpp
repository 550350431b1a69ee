#include "mdbd/dynamics.hpp"

#include <stdexcept>

namespace mdbd {

OutputState output_map(const NetworkProblem& net, const StackedState& s,
                       ProjectionMode mode) {
  const int nn = net.n_agents();
  if (s.y.cols() != nn || s.y.rows() != net.dim_n())
    throw std::invalid_argument("output_map: state shape mismatch");
  OutputState z;
  z.x.resize(net.dim_n(), nn);
  for (int i = 0; i < nn; ++i)
    z.x.col(i) = mirror_map(net.agents[i].generator, s.y.col(i), mode);
  z.lambda = s.gamma.cwiseMax(0.0);
  z.mu = s.mu;
  z.omega = s.omega;
  z.nu = s.nu;
  return z;
}

FieldEvaluation mdbd_field(const NetworkProblem& net, const StackedState& s,
                           ProjectionMode mode) {
  if (!s.all_finite())
    throw std::runtime_error("mdbd_field: non-finite state, integration aborted");
  const int nn = net.n_agents();
  const OutputState z = output_map(net, s, mode);

  FieldEvaluation ev;
  ev.ds = StackedState::zero(net);
  ev.selected_cost_subgradients.resize(net.dim_n(), nn);

  const Eigen::MatrixXd l_omega = laplacian_apply(net.graph, z.omega);
  const Eigen::MatrixXd l_nu = laplacian_apply(net.graph, z.nu);
  ev.ds.omega = laplacian_apply(net.graph, z.lambda);
  ev.ds.nu = laplacian_apply(net.graph, z.mu);

  for (int i = 0; i < nn; ++i) {
    const auto& a = net.agents[i];
    const Eigen::VectorXd xi = z.x.col(i);
    const Eigen::VectorXd df = subgrad_cost(a, xi);
    ev.selected_cost_subgradients.col(i) = df;
    ev.ds.y.col(i) = -df - subgrad_ineq(a, xi).transpose() * z.lambda.col(i) -
                     a.eq_matrix.transpose() * z.mu.col(i) +
                     damping(a.generator, xi) - s.y.col(i);
    ev.ds.gamma.col(i) =
        eval_ineq(a, xi) - l_omega.col(i) + z.lambda.col(i) - s.gamma.col(i);
    ev.ds.mu.col(i) = a.eq_matrix * xi - a.eq_offset - l_nu.col(i);
  }
  return ev;
}

NetworkProblem with_quadratic_generators(const NetworkProblem& net) {
  NetworkProblem q = net;
  for (auto& a : q.agents) a.generator = GeneratingFunction::quadratic(a.set);
  return q;
}

FieldEvaluation projection_baseline_field(const NetworkProblem& net,
                                          const StackedState& s,
                                          ProjectionMode mode) {
  return mdbd_field(with_quadratic_generators(net), s, mode);
}

}  // namespace mdbd

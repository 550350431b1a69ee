#include <doctest.h>

#include "mdbd/integrator.hpp"
#include "mdbd/oracle.hpp"

using namespace mdbd;

TEST_CASE("oracle matches the symbolic KKT solution of the regression instance") {
  GeneratedInstance inst = regression_instance(0.3, 0.5);
  SaddlePoint sp = solve_reference(inst.net, 1e-8);
  // Interior stationarity: x1 = (1 + c1 - c2)/2, mu = -2(x1 - c1).
  CHECK(sp.z_star.x(0, 0) == doctest::Approx(0.4).epsilon(1e-8));
  CHECK(sp.z_star.x(0, 1) == doctest::Approx(0.6).epsilon(1e-8));
  CHECK(sp.z_star.mu(0, 0) == doctest::Approx(-0.2).epsilon(1e-7));
  CHECK(sp.z_star.mu(0, 1) == doctest::Approx(-0.2).epsilon(1e-7));
  CHECK(sp.optimal_value == doctest::Approx(0.02).epsilon(1e-8));
  CHECK(sp.achieved_residual <= 1e-8);
}

TEST_CASE("tiny simplex instance agrees with mesh search") {
  InstanceOptions opts;
  opts.q = 0;  // keep every mesh node equality-feasible
  GeneratedInstance inst = generate_instance(51, 2, 2, opts);
  SaddlePoint sp = solve_reference(inst.net, 1e-7);
  Eigen::MatrixXd mesh = mesh_search(inst.net, 2.5e-4);
  double mesh_cost = 0.0, oracle_cost = 0.0;
  for (int i = 0; i < 2; ++i) {
    mesh_cost += eval_cost(inst.net.agents[i], mesh.col(i));
    oracle_cost += eval_cost(inst.net.agents[i], sp.z_star.x.col(i));
  }
  CHECK((mesh - sp.z_star.x).lpNorm<Eigen::Infinity>() < 1e-3);
  CHECK(std::abs(mesh_cost - oracle_cost) < 1e-4);
}

TEST_CASE("mesh search on an unconstrained-interior toy") {
  // Two box agents, no coupling: minimizer is the per-agent target.
  NetworkProblem net;
  net.family = "toy";
  net.graph = Graph::cycle(2);
  for (double target : {0.3, 0.6}) {
    LocalProblem a;
    a.cost.w = Eigen::MatrixXd::Identity(1, 1);
    a.cost.d = Eigen::VectorXd::Constant(1, target);
    a.eq_matrix = Eigen::MatrixXd::Zero(1, 1);
    a.eq_offset = Eigen::VectorXd::Zero(1);
    a.set = ConstraintSet::box(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
    a.generator = GeneratingFunction::quadratic(a.set);
    net.agents.push_back(std::move(a));
  }
  Eigen::MatrixXd best = mesh_search(net, 1e-3);
  CHECK(std::abs(best(0, 0) - 0.3) <= 1e-3 + 1e-12);
  CHECK(std::abs(best(0, 1) - 0.6) <= 1e-3 + 1e-12);
}

TEST_CASE("mesh search reports NO_FEASIBLE_NODE") {
  GeneratedInstance inst = regression_instance();
  NetworkProblem net = inst.net;
  // Shift the equality offset out of reach of [0,1]^2.
  for (auto& a : net.agents) a.eq_offset = Eigen::VectorXd::Constant(1, 5.0);
  CHECK_THROWS_WITH_AS(mesh_search(net, 1e-2), doctest::Contains("NO_FEASIBLE_NODE"),
                       std::runtime_error);
}

TEST_CASE("mesh search rejects high-dimensional problems") {
  GeneratedInstance inst = generate_instance(52, 10, 4);
  CHECK_THROWS_AS(mesh_search(inst.net, 1e-2), std::invalid_argument);
}

TEST_CASE("oracle cross-validates with a long MDBD run") {
  GeneratedInstance inst = generate_instance(4, 10, 4);
  SaddlePoint sp = solve_reference(inst.net, 1e-7);
  CHECK(sp.achieved_residual <= 1e-7);

  Dynamics dyn(inst.net);
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.horizon = 60.0;
  cfg.record_every = 5000;
  TrajectoryRecord rec = integrate(dyn, StackedState::zero(inst.net), cfg, &sp);
  CHECK_FALSE(rec.diverged);
  CHECK((rec.outputs.back().x - sp.z_star.x).norm() < 1e-2);
}

TEST_CASE("non-convergence raises with the best residual") {
  GeneratedInstance inst = generate_instance(54, 4, 3);
  OracleOptions weak;
  weak.subgradient_iters = 5;
  weak.outer_iters = 1;
  weak.inner_iters = 2;
  weak.polish = false;
  CHECK_THROWS_AS(solve_reference(inst.net, 1e-12, weak), std::runtime_error);
}

#include <doctest.h>

#include <random>

#include "mdbd/problem.hpp"
#include "mdbd/serialization.hpp"

using namespace mdbd;

namespace {

std::mt19937_64 rng(7);
double unif(double lo, double hi) {
  return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

Eigen::VectorXd random_vec(int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int k = 0; k < n; ++k) v[k] = unif(lo, hi);
  return v;
}

LocalProblem toy_agent() {
  LocalProblem a;
  a.cost.w = Eigen::MatrixXd::Identity(2, 2);
  a.cost.d = Eigen::VectorXd::Zero(2);
  a.cost.l1_coef = 1.0;
  a.ineq.push_back({1.0, 25.0 / 9.0});
  a.eq_matrix = Eigen::MatrixXd::Zero(1, 2);
  a.eq_offset = Eigen::VectorXd::Zero(1);
  a.set = ConstraintSet::unit_simplex(2);
  a.generator = GeneratingFunction::entropy_on_simplex(2);
  return a;
}

}  // namespace

TEST_CASE("cost evaluation and subgradient") {
  LocalProblem a = toy_agent();
  Eigen::VectorXd x(2);
  x << 1.0, -1.0;
  CHECK(eval_cost(a, x) == doctest::Approx(4.0));  // ||x||^2 + ||x||_1 = 2 + 2

  // l1 subgradient component at 0 is the minimal-norm selection 0.
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  CHECK((subgrad_cost(a, zero) - 2.0 * a.cost.w.transpose() * (-a.cost.d)).norm() <
        1e-15);

  // Finite differences of the smooth part match away from kinks.
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd p = random_vec(2, 0.1, 1.0);  // strictly positive, no kink
    Eigen::VectorXd g = subgrad_cost(a, p);
    const double eps = 1e-6;
    for (int k = 0; k < 2; ++k) {
      Eigen::VectorXd hi = p, lo = p;
      hi[k] += eps;
      lo[k] -= eps;
      CHECK(std::abs((eval_cost(a, hi) - eval_cost(a, lo)) / (2 * eps) - g[k]) < 1e-5);
    }
  }
}

TEST_CASE("coupled inequality evaluation") {
  // n=4, agent index 1, c=1, uniform point.
  LocalProblem a;
  a.cost.w = Eigen::MatrixXd::Identity(4, 4);
  a.cost.d = Eigen::VectorXd::Zero(4);
  a.cost.l1_coef = 1.0;
  a.ineq.push_back({1.0, 25.0 / 9.0});
  a.eq_matrix = Eigen::MatrixXd::Zero(1, 4);
  a.eq_offset = Eigen::VectorXd::Zero(1);
  a.set = ConstraintSet::unit_simplex(4);
  a.generator = GeneratingFunction::entropy_on_simplex(4);

  Eigen::VectorXd quarter = Eigen::VectorXd::Constant(4, 0.25);
  CHECK(eval_ineq(a, quarter)[0] == doctest::Approx(0.25 + 1.0 - 25.0 / 9.0));

  // Origin strictly feasible for the inequality.
  CHECK(eval_ineq(a, Eigen::VectorXd::Zero(4))[0] < 0.0);

  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd p = random_vec(4, 0.05, 1.0);
    Eigen::MatrixXd j = subgrad_ineq(a, p);
    const double eps = 1e-6;
    for (int k = 0; k < 4; ++k) {
      Eigen::VectorXd hi = p, lo = p;
      hi[k] += eps;
      lo[k] -= eps;
      CHECK(std::abs((eval_ineq(a, hi)[0] - eval_ineq(a, lo)[0]) / (2 * eps) -
                     j(0, k)) < 1e-5);
    }
  }
}

TEST_CASE("equality residual") {
  GeneratedInstance inst = regression_instance();
  Eigen::MatrixXd x(1, 2);
  x << 0.3, 0.7;
  CHECK(equality_residual(inst.net, x).norm() == doctest::Approx(0.0));
  x << 0.3, 0.4;
  CHECK(equality_residual(inst.net, x)[0] == doctest::Approx(-0.3));
  CHECK_THROWS_AS(equality_residual(inst.net, Eigen::MatrixXd::Zero(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("instance generation is deterministic and Slater-feasible") {
  GeneratedInstance a = generate_instance(7, 10, 4);
  GeneratedInstance b = generate_instance(7, 10, 4);
  CHECK(instance_to_json(a.net) == instance_to_json(b.net));

  CHECK(a.slater.slack > 0.0);
  CHECK(a.slater.eq_residual <= 1e-9);
  CHECK(is_connected(a.net.graph));

  GeneratedInstance c = generate_instance(8, 10, 4);
  CHECK(instance_to_json(a.net) != instance_to_json(c.net));
}

TEST_CASE("infeasible parameter combination is rejected with agent index") {
  InstanceOptions opts;
  opts.l1_coef = 5.0;  // inequality cannot hold at the uniform point
  CHECK_THROWS_WITH_AS(generate_instance(1, 10, 4, opts),
                       doctest::Contains("agent"), std::invalid_argument);
}

TEST_CASE("convexity and subgradient inequality spot checks") {
  GeneratedInstance inst = generate_instance(3, 4, 3);
  const auto& agent = inst.net.agents[0];
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::VectorXd x = random_vec(3, -1.0, 1.0);
    Eigen::VectorXd y = random_vec(3, -1.0, 1.0);
    const double t = unif(0.0, 1.0);
    Eigen::VectorXd m = t * x + (1.0 - t) * y;
    CHECK(eval_cost(agent, m) <=
          t * eval_cost(agent, x) + (1.0 - t) * eval_cost(agent, y) + 1e-9);
    CHECK(eval_ineq(agent, m)[0] <=
          t * eval_ineq(agent, x)[0] + (1.0 - t) * eval_ineq(agent, y)[0] + 1e-9);

    CHECK(eval_cost(agent, y) >=
          eval_cost(agent, x) + subgrad_cost(agent, x).dot(y - x) - 1e-9);
    CHECK(eval_ineq(agent, y)[0] >=
          eval_ineq(agent, x)[0] +
              subgrad_ineq(agent, x).row(0).dot(y - x) - 1e-9);
  }
}

TEST_CASE("instance JSON round trip") {
  GeneratedInstance inst = generate_instance(11, 5, 3);
  const std::string text = instance_to_json(inst.net, &inst.slater);
  GeneratedInstance back = instance_from_json(text);
  CHECK(instance_to_json(back.net, &back.slater) == text);
  CHECK(back.net.dim_p() == inst.net.dim_p());
  CHECK(back.net.dim_q() == inst.net.dim_q());
}

TEST_CASE("validation rejects disconnected graphs and mismatched generators") {
  GeneratedInstance inst = generate_instance(2, 4, 3);
  NetworkProblem broken = inst.net;
  broken.graph = Graph(4, Eigen::MatrixXd::Zero(4, 4));
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);

  NetworkProblem mismatched = inst.net;
  mismatched.agents[0].generator =
      GeneratingFunction::quadratic(ConstraintSet::nonnegative_orthant(3));
  CHECK_THROWS_AS(mismatched.validate(), std::invalid_argument);
}

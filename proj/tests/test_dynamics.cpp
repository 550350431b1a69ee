#include <doctest.h>

#include <random>

#include "mdbd/dynamics.hpp"
#include "mdbd/oracle.hpp"

using namespace mdbd;

namespace {

std::mt19937_64 rng(17);
double unif(double lo, double hi) {
  return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

StackedState random_state(const NetworkProblem& net, double scale) {
  StackedState s = StackedState::zero(net);
  auto fill = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = unif(-scale, scale);
  };
  fill(s.y);
  fill(s.gamma);
  fill(s.mu);
  fill(s.omega);
  fill(s.nu);
  return s;
}

}  // namespace

TEST_CASE("output map clamps through projection and positive part") {
  GeneratedInstance inst = regression_instance();
  StackedState s = StackedState::zero(inst.net);
  s.y(0, 0) = 2.0;
  s.y(0, 1) = -1.0;
  OutputState z = output_map(inst.net, s);
  CHECK(z.x(0, 0) == doctest::Approx(1.0));  // Box[0,1] clamp
  CHECK(z.x(0, 1) == doctest::Approx(0.0));

  GeneratedInstance simplex = generate_instance(1, 3, 4);
  StackedState s2 = StackedState::zero(simplex.net);
  s2.gamma(0, 0) = -3.0;
  s2.gamma(0, 1) = 2.0;
  OutputState z2 = output_map(simplex.net, s2);
  CHECK(z2.lambda(0, 0) == doctest::Approx(0.0));
  CHECK(z2.lambda(0, 1) == doctest::Approx(2.0));
  // Entropy map of y = 0 is the uniform vector.
  CHECK((z2.x.col(0) - Eigen::VectorXd::Constant(4, 0.25)).norm() < 1e-14);
}

TEST_CASE("field vanishes at the saddle preimage") {
  GeneratedInstance inst = regression_instance();
  SaddlePoint sp = solve_reference(inst.net, 1e-9);
  FieldEvaluation ev = mdbd_field(inst.net, sp.s_star);
  CHECK(ev.ds.y.norm() + ev.ds.gamma.norm() + ev.ds.mu.norm() +
            ev.ds.omega.norm() + ev.ds.nu.norm() <
        1e-7);
}

TEST_CASE("single smooth agent with zero multipliers reduces to -grad f + x - y") {
  // Two agents to satisfy the connectivity requirement; no coupling active.
  GeneratedInstance inst = regression_instance();
  StackedState s = StackedState::zero(inst.net);
  s.y(0, 0) = 0.3;
  s.y(0, 1) = 0.8;
  FieldEvaluation ev = mdbd_field(inst.net, s);
  OutputState z = output_map(inst.net, s);
  for (int i = 0; i < 2; ++i) {
    const auto& a = inst.net.agents[i];
    Eigen::VectorXd expected =
        -subgrad_cost(a, z.x.col(i)) + z.x.col(i) - s.y.col(i);
    // mu = 0 kills the equality term.
    CHECK((ev.ds.y.col(i) - expected).norm() < 1e-14);
  }
}

TEST_CASE("consensus blocks are annihilated by equal multipliers") {
  GeneratedInstance inst = generate_instance(5, 6, 3);
  StackedState s = random_state(inst.net, 1.0);
  // Equal gamma columns (all positive) force equal lambda columns.
  s.gamma = Eigen::VectorXd::Constant(inst.net.dim_p(), 0.7)
                .replicate(1, inst.net.n_agents());
  s.mu = Eigen::VectorXd::LinSpaced(inst.net.dim_q(), 0.1, 0.4)
             .replicate(1, inst.net.n_agents());
  FieldEvaluation ev = mdbd_field(inst.net, s);
  CHECK(ev.ds.omega.norm() < 1e-12);
  CHECK(ev.ds.nu.norm() < 1e-12);
}

TEST_CASE("quadratic generators reduce MDBD to the projection baseline") {
  GeneratedInstance inst = generate_instance(9, 5, 3);
  NetworkProblem quad = with_quadratic_generators(inst.net);
  for (int trial = 0; trial < 20; ++trial) {
    StackedState s = random_state(quad, 2.0);
    FieldEvaluation a = mdbd_field(quad, s);
    FieldEvaluation b = projection_baseline_field(inst.net, s);
    CHECK((a.ds - b.ds).norm() < 1e-12);
  }
}

TEST_CASE("(mu, omega, nu) flows do not depend on the generating function") {
  GeneratedInstance inst = generate_instance(13, 5, 3);
  for (int trial = 0; trial < 10; ++trial) {
    StackedState s = random_state(inst.net, 1.5);
    FieldEvaluation ent = mdbd_field(inst.net, s);
    FieldEvaluation quad = projection_baseline_field(inst.net, s);
    // x differs between the two output maps, so mu flows differ; omega and
    // nu depend only on lambda and mu, which are generator-independent.
    CHECK((ent.ds.omega - quad.ds.omega).norm() < 1e-14);
    CHECK((ent.ds.nu - quad.ds.nu).norm() < 1e-14);
  }
}

TEST_CASE("output feasibility for arbitrary states") {
  GeneratedInstance inst = generate_instance(21, 4, 5);
  for (int trial = 0; trial < 30; ++trial) {
    StackedState s = random_state(inst.net, 10.0);
    OutputState z = output_map(inst.net, s);
    for (int i = 0; i < inst.net.n_agents(); ++i)
      CHECK(inst.net.agents[i].set.contains(z.x.col(i), 1e-12));
    CHECK(z.lambda.minCoeff() >= 0.0);
  }
}

TEST_CASE("non-finite state aborts with a diagnostic") {
  GeneratedInstance inst = generate_instance(2, 3, 2);
  StackedState s = StackedState::zero(inst.net);
  s.y(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(mdbd_field(inst.net, s), std::runtime_error);
}

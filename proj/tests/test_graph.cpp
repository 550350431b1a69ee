#include <doctest.h>

#include <random>

#include "mdbd/graph.hpp"

using namespace mdbd;

namespace {

Graph random_graph(std::mt19937_64& rng, int n, double edge_prob) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (u(rng) < edge_prob) w(i, j) = w(j, i) = u(rng) + 0.1;
  return Graph(n, std::move(w));
}

// Dense Kronecker-product reference (L (x) I_d) v.
Eigen::MatrixXd kron_apply_reference(const Graph& g, const Eigen::MatrixXd& v) {
  const int n = g.n_agents;
  const int d = static_cast<int>(v.rows());
  Eigen::MatrixXd l = laplacian(g);
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(n * d, n * d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      big.block(i * d, j * d, d, d) = l(i, j) * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd stacked(n * d);
  for (int i = 0; i < n; ++i) stacked.segment(i * d, d) = v.col(i);
  Eigen::VectorXd out = big * stacked;
  Eigen::MatrixXd result(d, n);
  for (int i = 0; i < n; ++i) result.col(i) = out.segment(i * d, d);
  return result;
}

}  // namespace

TEST_CASE("laplacian of the 3-cycle with unit weights") {
  Eigen::MatrixXd l = laplacian(Graph::cycle(3));
  Eigen::MatrixXd expected(3, 3);
  expected << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  CHECK((l - expected).norm() == doctest::Approx(0.0));
}

TEST_CASE("laplacian of a single weighted edge") {
  Eigen::MatrixXd l = laplacian(Graph::single_edge(2, 0, 1, 2.0));
  Eigen::MatrixXd expected(2, 2);
  expected << 2, -2, -2, 2;
  CHECK((l - expected).norm() == doctest::Approx(0.0));
}

TEST_CASE("laplacian rows sum to zero") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = random_graph(rng, 8, 0.5);
    CHECK(laplacian(g).rowwise().sum().norm() < 1e-12);
  }
}

TEST_CASE("laplacian_apply on consensus input is zero") {
  Graph g = Graph::cycle(5);
  Eigen::MatrixXd v = Eigen::VectorXd::LinSpaced(3, 1.0, 3.0).replicate(1, 5);
  CHECK(laplacian_apply(g, v).norm() < 1e-12);
}

TEST_CASE("laplacian_apply on two agents, unit edge") {
  Graph g = Graph::single_edge(2, 0, 1);
  Eigen::MatrixXd v(1, 2);
  v << 1.0, 0.0;
  Eigen::MatrixXd out = laplacian_apply(g, v);
  CHECK(out(0, 0) == doctest::Approx(1.0));
  CHECK(out(0, 1) == doctest::Approx(-1.0));
}

TEST_CASE("laplacian_apply matches the dense Kronecker product") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss;
  Graph g = Graph::cycle(10);
  Eigen::MatrixXd v(4, 10);
  for (int r = 0; r < v.rows(); ++r)
    for (int c = 0; c < v.cols(); ++c) v(r, c) = gauss(rng);
  CHECK((laplacian_apply(g, v) - kron_apply_reference(g, v)).norm() < 1e-12);
}

TEST_CASE("laplacian_apply with d=1 equals L*v") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 10; ++trial) {
    Graph g = random_graph(rng, 7, 0.6);
    Eigen::MatrixXd v(1, 7);
    for (int c = 0; c < 7; ++c) v(0, c) = gauss(rng);
    Eigen::VectorXd expected = laplacian(g) * v.transpose();
    CHECK((laplacian_apply(g, v).transpose() - expected).norm() < 1e-12);
  }
}

TEST_CASE("laplacian quadratic form is nonnegative") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = random_graph(rng, 6, 0.5);
    Eigen::VectorXd v(6);
    for (int k = 0; k < 6; ++k) v[k] = gauss(rng);
    CHECK(v.dot(laplacian(g) * v) >= -1e-12);
  }
  // Constant vector annihilates the Laplacian of a connected graph.
  Graph g = Graph::cycle(6);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(6);
  CHECK(ones.dot(laplacian(g) * ones) == doctest::Approx(0.0));
}

TEST_CASE("connectivity") {
  CHECK(is_connected(Graph::cycle(10)));
  CHECK(is_connected(Graph(1, Eigen::MatrixXd::Zero(1, 1))));
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  w(0, 1) = w(1, 0) = 1.0;
  w(2, 3) = w(3, 2) = 1.0;
  CHECK_FALSE(is_connected(Graph(4, std::move(w))));
}

TEST_CASE("malformed graphs are rejected") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 2);
  w(0, 1) = 1.0;  // asymmetric
  CHECK_THROWS_AS(Graph(2, w), std::invalid_argument);
  CHECK_THROWS_AS(laplacian_apply(Graph::cycle(3), Eigen::MatrixXd::Zero(2, 4)),
                  std::invalid_argument);
}

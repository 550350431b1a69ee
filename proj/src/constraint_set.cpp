#include "mdbd/constraint_set.hpp"

#include <algorithm>
#include <stdexcept>

namespace mdbd {

ConstraintSet ConstraintSet::unit_simplex(int n) {
  if (n <= 0) throw std::invalid_argument("unit_simplex: dimension must be positive");
  ConstraintSet s;
  s.kind = SetKind::UnitSimplex;
  s.dim = n;
  return s;
}

ConstraintSet ConstraintSet::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw std::invalid_argument("box: bound dimensions mismatch");
  if ((lower.array() > upper.array()).any())
    throw std::invalid_argument("box: empty (lower > upper)");
  ConstraintSet s;
  s.kind = SetKind::Box;
  s.dim = static_cast<int>(lower.size());
  s.lower = std::move(lower);
  s.upper = std::move(upper);
  return s;
}

ConstraintSet ConstraintSet::ball(Eigen::VectorXd center, double radius) {
  if (radius < 0.0) throw std::invalid_argument("ball: negative radius");
  ConstraintSet s;
  s.kind = SetKind::Ball;
  s.dim = static_cast<int>(center.size());
  s.center = std::move(center);
  s.radius = radius;
  return s;
}

ConstraintSet ConstraintSet::nonnegative_orthant(int n) {
  if (n <= 0) throw std::invalid_argument("nonnegative_orthant: dimension must be positive");
  ConstraintSet s;
  s.kind = SetKind::NonnegativeOrthant;
  s.dim = n;
  return s;
}

bool ConstraintSet::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != dim) return false;
  switch (kind) {
    case SetKind::UnitSimplex:
      return x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= tol;
    case SetKind::Box:
      return (x.array() >= lower.array() - tol).all() &&
             (x.array() <= upper.array() + tol).all();
    case SetKind::Ball:
      return (x - center).norm() <= radius + tol;
    case SetKind::NonnegativeOrthant:
      return x.minCoeff() >= -tol;
  }
  return false;
}

bool operator==(const ConstraintSet& a, const ConstraintSet& b) {
  if (a.kind != b.kind || a.dim != b.dim) return false;
  switch (a.kind) {
    case SetKind::Box:
      return a.lower == b.lower && a.upper == b.upper;
    case SetKind::Ball:
      return a.center == b.center && a.radius == b.radius;
    default:
      return true;
  }
}

Eigen::VectorXd project_simplex_fast(const Eigen::VectorXd& z) {
  const int n = static_cast<int>(z.size());
  std::vector<double> u(z.data(), z.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0, theta = 0.0;
  int rho = 0;
  for (int k = 0; k < n; ++k) {
    cumsum += u[k];
    double t = (cumsum - 1.0) / (k + 1);
    if (u[k] - t > 0.0) {
      rho = k + 1;
      theta = t;
    }
  }
  (void)rho;
  return (z.array() - theta).cwiseMax(0.0);
}

Eigen::VectorXd project_simplex_generic_qp(const Eigen::VectorXd& z, double tol,
                                           int max_iters) {
  // Treats the projection as an anonymous QP: min 1/2 x'Qx + c'x, 1'x = 1,
  // x >= 0, with Q dense (here Q = I, c = -z, but the solver does not use
  // that structure). ADMM splitting x / v with v >= 0; the x-update solves
  // the dense equality-constrained KKT system, factored once per call.
  const int n = static_cast<int>(z.size());
  const double rho = 1.0;
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd c = -z;

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + 1, n + 1);
  kkt.topLeftCorner(n, n) = q + rho * Eigen::MatrixXd::Identity(n, n);
  kkt.topRightCorner(n, 1).setOnes();
  kkt.bottomLeftCorner(1, n).setOnes();
  Eigen::LDLT<Eigen::MatrixXd> solver(kkt);

  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::VectorXd v = x, u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd rhs(n + 1);
  rhs(n) = 1.0;
  for (int it = 0; it < max_iters; ++it) {
    rhs.head(n) = -c + rho * (v - u);
    x = solver.solve(rhs).head(n);
    Eigen::VectorXd v_prev = v;
    v = (x + u).cwiseMax(0.0);
    u += x - v;
    double primal = (x - v).norm();
    double dual = rho * (v - v_prev).norm();
    if (primal < tol && dual < tol) break;
  }
  return v / v.sum();
}

Eigen::VectorXd euclidean_project(const ConstraintSet& set, const Eigen::VectorXd& z,
                                  ProjectionMode mode) {
  if (z.size() != set.dim)
    throw std::invalid_argument("euclidean_project: dimension mismatch");
  switch (set.kind) {
    case SetKind::UnitSimplex:
      return mode == ProjectionMode::GenericQp ? project_simplex_generic_qp(z)
                                               : project_simplex_fast(z);
    case SetKind::Box:
      return z.cwiseMax(set.lower).cwiseMin(set.upper);
    case SetKind::Ball: {
      Eigen::VectorXd d = z - set.center;
      double r = d.norm();
      if (r <= set.radius) return z;
      return set.center + (set.radius / r) * d;
    }
    case SetKind::NonnegativeOrthant:
      return z.cwiseMax(0.0);
  }
  throw std::logic_error("euclidean_project: unknown set kind");
}

}  // namespace mdbd

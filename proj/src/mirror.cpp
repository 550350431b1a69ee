#include "mdbd/mirror.hpp"

#include <cmath>
#include <stdexcept>

namespace mdbd {

namespace {
constexpr double kPositivityClamp = 1e-300;  // guards log underflow only
}

GeneratingFunction GeneratingFunction::entropy_on_simplex(int n) {
  GeneratingFunction f;
  f.kind = GeneratorKind::Entropy;
  f.domain = ConstraintSet::unit_simplex(n);
  return f;
}

GeneratingFunction GeneratingFunction::quadratic(ConstraintSet domain) {
  GeneratingFunction f;
  f.kind = GeneratorKind::Quadratic;
  f.domain = std::move(domain);
  return f;
}

double generator_value(const GeneratingFunction& f, const Eigen::VectorXd& x) {
  if (f.kind == GeneratorKind::Quadratic) return 0.5 * x.squaredNorm();
  double v = 0.0;
  for (int k = 0; k < x.size(); ++k) {
    if (x[k] > 0.0) v += x[k] * std::log(x[k]);  // 0 log 0 = 0
  }
  return v;
}

Eigen::VectorXd damping(const GeneratingFunction& f, const Eigen::VectorXd& x) {
  if (f.kind == GeneratorKind::Quadratic) return x;
  return 1.0 + x.cwiseMax(kPositivityClamp).array().log();
}

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  Eigen::ArrayXd e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

Eigen::VectorXd mirror_map(const GeneratingFunction& f, const Eigen::VectorXd& z,
                           ProjectionMode mode) {
  if (!z.allFinite()) throw std::invalid_argument("mirror_map: non-finite input");
  if (z.size() != f.domain.dim)
    throw std::invalid_argument("mirror_map: dimension mismatch");
  if (f.kind == GeneratorKind::Entropy) return softmax(z);
  return euclidean_project(f.domain, z, mode);
}

double bregman_divergence(const GeneratingFunction& f, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y) {
  if (!f.domain.contains(x) || !f.domain.contains(y))
    throw std::invalid_argument("bregman_divergence: point outside domain");
  return generator_value(f, x) - generator_value(f, y) -
         damping(f, y).dot(x - y);
}

}  // namespace mdbd

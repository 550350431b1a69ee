#include "mdbd/integrator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mdbd {

Dynamics::Dynamics(const NetworkProblem& problem, Algorithm alg,
                   ProjectionMode mode)
    : net(&problem), algorithm(alg), projection_mode(mode) {
  if (alg == Algorithm::ProjectionBaseline)
    quadratic_net_ = with_quadratic_generators(problem);
}

const NetworkProblem& Dynamics::effective_problem() const {
  return algorithm == Algorithm::ProjectionBaseline ? quadratic_net_ : *net;
}

StackedState Dynamics::eval(const StackedState& s) const {
  return mdbd_field(effective_problem(), s, projection_mode).ds;
}

OutputState Dynamics::output(const StackedState& s) const {
  return output_map(effective_problem(), s, projection_mode);
}

StackedState step(const Dynamics& dyn, const StackedState& s, double h,
                  Scheme scheme) {
  if (h <= 0.0) throw std::invalid_argument("step: h must be positive");
  if (scheme == Scheme::ExplicitEuler) return s + h * dyn.eval(s);
  const StackedState k1 = dyn.eval(s);
  const StackedState k2 = dyn.eval(s + (0.5 * h) * k1);
  const StackedState k3 = dyn.eval(s + (0.5 * h) * k2);
  const StackedState k4 = dyn.eval(s + h * k3);
  return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

struct RunningIntegrals {
  Eigen::MatrixXd x, lambda, mu, omega, nu;

  explicit RunningIntegrals(const OutputState& z0)
      : x(Eigen::MatrixXd::Zero(z0.x.rows(), z0.x.cols())),
        lambda(Eigen::MatrixXd::Zero(z0.lambda.rows(), z0.lambda.cols())),
        mu(Eigen::MatrixXd::Zero(z0.mu.rows(), z0.mu.cols())),
        omega(Eigen::MatrixXd::Zero(z0.omega.rows(), z0.omega.cols())),
        nu(Eigen::MatrixXd::Zero(z0.nu.rows(), z0.nu.cols())) {}

  void add_trapezoid(const OutputState& a, const OutputState& b, double h) {
    x += (0.5 * h) * (a.x + b.x);
    lambda += (0.5 * h) * (a.lambda + b.lambda);
    mu += (0.5 * h) * (a.mu + b.mu);
    omega += (0.5 * h) * (a.omega + b.omega);
    nu += (0.5 * h) * (a.nu + b.nu);
  }

  ErgodicAverages average(double t, const OutputState& current) const {
    if (t <= 0.0)
      return {current.x, current.lambda, current.mu, current.omega, current.nu};
    return {x / t, lambda / t, mu / t, omega / t, nu / t};
  }
};

}  // namespace

double lyapunov_v1(const NetworkProblem& net, const StackedState& s,
                   const OutputState& z, const SaddlePoint& ref) {
  double v = 0.0;
  for (int i = 0; i < net.n_agents(); ++i) {
    const auto& gen = net.agents[i].generator;
    v += generator_value(gen, ref.z_star.x.col(i)) -
         generator_value(gen, z.x.col(i)) -
         (ref.z_star.x.col(i) - z.x.col(i)).dot(s.y.col(i));
  }
  v += 0.5 * (s.gamma - ref.s_star.gamma).squaredNorm();
  v += 0.5 * (s.mu - ref.s_star.mu).squaredNorm();
  v += 0.5 * (s.omega - ref.s_star.omega).squaredNorm();
  v += 0.5 * (s.nu - ref.s_star.nu).squaredNorm();
  return v;
}

double duality_gap(const NetworkProblem& net, const ErgodicAverages& avg,
                   const SaddlePoint& ref) {
  OutputState a;  // (x_hat, lambda*, mu*, omega_hat, nu_hat)
  a.x = avg.x_hat;
  a.lambda = ref.z_star.lambda;
  a.mu = ref.z_star.mu;
  a.omega = avg.omega_hat;
  a.nu = avg.nu_hat;
  OutputState b;  // (x*, lambda_hat, mu_hat, omega*, nu*)
  b.x = ref.z_star.x;
  b.lambda = avg.lambda_hat;
  b.mu = avg.mu_hat;
  b.omega = ref.z_star.omega;
  b.nu = ref.z_star.nu;
  double gap = lagrangian(net, a) - lagrangian(net, b);
  if (gap < 0.0 && gap > -1e-9) gap = 0.0;
  return gap;
}

TrajectoryRecord integrate(const Dynamics& dyn, const StackedState& s0,
                           const IntegratorConfig& cfg,
                           const SaddlePoint* reference) {
  if (!s0.all_finite()) throw std::invalid_argument("integrate: non-finite s0");
  if (cfg.step <= 0.0 || cfg.horizon < cfg.step || cfg.record_every <= 0)
    throw std::invalid_argument("integrate: bad config");
  const NetworkProblem& net = dyn.effective_problem();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  TrajectoryRecord rec;
  StackedState s = s0;
  OutputState z = dyn.output(s);
  RunningIntegrals integrals(z);

  const long n_steps = static_cast<long>(std::llround(cfg.horizon / cfg.step));
  auto record = [&](double t) {
    rec.times.push_back(t);
    rec.states.push_back(s);
    rec.outputs.push_back(z);
    ErgodicAverages avg = integrals.average(t, z);
    DiagnosticsRow d;
    d.t = t;
    d.kkt_residual = kkt_residual(net, z);
    d.ineq_residual = inequality_sum(net, z.x).cwiseMax(0.0).norm();
    d.eq_residual = equality_residual(net, z.x).norm();
    d.s_norm = s.norm();
    d.v1 = reference ? lyapunov_v1(net, s, z, *reference) : nan;
    d.gap = (reference && t > 0.0) ? duality_gap(net, avg, *reference) : nan;
    rec.diagnostics.push_back(d);
    rec.averages.push_back(std::move(avg));
  };
  record(0.0);

  for (long k = 1; k <= n_steps; ++k) {
    StackedState s_next = step(dyn, s, cfg.step, cfg.scheme);
    if (!s_next.all_finite() || s_next.norm() > cfg.divergence_bound) {
      rec.diverged = true;
      break;
    }
    OutputState z_next = dyn.output(s_next);
    integrals.add_trapezoid(z, z_next, cfg.step);
    s = std::move(s_next);
    z = std::move(z_next);
    if (k % cfg.record_every == 0 || k == n_steps) record(k * cfg.step);
  }
  return rec;
}

}  // namespace mdbd
